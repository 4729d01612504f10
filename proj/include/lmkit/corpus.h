// lmkit/corpus.h

// Copyright 2026  The lmkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LMKIT_CORPUS_H_
#define LMKIT_CORPUS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "lmkit/common.h"
#include "lmkit/vocab.h"

namespace lmkit {

// Corpus text format: one sentence per line, whitespace tokenized.  A line
// consisting solely of "<art>" ends the current article; "<p>" likewise
// ends a paragraph.  Marker lines become one-token sentences whose terminal
// is the marker itself; ordinary lines are terminated with </s>.
//
// A Sentence holds the mapped token ids including the terminal symbol but
// not the begin padding; padding is added when counting or scoring.
struct Sentence {
  TokenSeq tokens;              // body tokens + one terminal symbol
  uint32_t document = 0;        // article index, for cache resets

  TokenId terminal() const { return tokens.back(); }
};

struct Corpus {
  std::vector<Sentence> sentences;
  uint32_t num_documents = 0;
  uint64_t num_tokens = 0;      // sum of sentence lengths (with terminals)
};

// Reads and id-maps a corpus.  Out-of-vocabulary words map to <unk>.
Corpus ReadCorpus(std::istream& text, const Vocabulary& vocab);
Corpus ReadCorpusFile(const std::string& path, const Vocabulary& vocab);

struct CorpusPartition {
  Corpus training;
  Corpus heldout;
  Corpus test;
};

// Deterministic heldout/test selection with period k: sentence indices
// congruent to 0 (mod k) go to heldout and indices congruent to floor(k/2)
// (mod k) go to test; everything else is training.  Document structure is
// renumbered per stream so each stream carries its own article boundaries.
CorpusPartition PartitionCorpus(const Corpus& corpus, uint32_t period_k);

// Returns the padded token sequence for a sentence: order-1 begin symbols
// followed by the sentence tokens.  Predicted positions are order-1 .. end.
TokenSeq PadSentence(const Sentence& sentence, uint32_t order);

}  // namespace lmkit

#endif  // LMKIT_CORPUS_H_
