// lmkit/vocab.h

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

#ifndef LMKIT_VOCAB_H_
#define LMKIT_VOCAB_H_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmkit/common.h"

namespace lmkit {

// Reserved ids.  kBegin pads sentence starts and is never predicted; the
// three terminal symbols are predicted like ordinary words.  kUnknown
// absorbs every out-of-vocabulary token.
enum SpecialToken : TokenId {
  kUnknown = 0,
  kEndOfSentence = 1,
  kEndOfParagraph = 2,
  kEndOfArticle = 3,
  kBegin = 4,
  kNumSpecials = 5,
};

extern const char* const kUnknownText;      // "<unk>"
extern const char* const kEndSentenceText;  // "</s>"
extern const char* const kEndParagraphText; // "<p>"
extern const char* const kEndArticleText;   // "<art>"
extern const char* const kBeginText;        // "<s>"

struct VocabularyConfig {
  // Words seen fewer than this many times in the stream map to <unk>.
  uint64_t min_count = 1;
};

// Dense word <-> id mapping with reserved special symbols.  Lookup of an
// out-of-vocabulary word yields kUnknown.
class Vocabulary {
 public:
  Vocabulary();

  // Adds a word if absent; returns its id.  Specials cannot be re-added.
  TokenId Add(const std::string& word);
  TokenId Lookup(const std::string& word) const;
  const std::string& Text(TokenId id) const;
  bool Contains(const std::string& word) const;

  size_t size() const { return words_.size(); }
  // Number of predictable events: everything except the begin padding
  // symbol.  Uniform mixing and additive smoothing use this size.
  size_t event_size() const { return words_.size() - 1; }

  void Write(std::ostream& out) const;
  static Vocabulary Read(std::istream& in);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

// Builds a vocabulary from whitespace-tokenized text: every word meeting
// the frequency threshold plus the special symbols.  Marker lines (see
// corpus.h) never enter the vocabulary as plain words.
Vocabulary BuildVocabulary(std::istream& text, const VocabularyConfig& config);

}  // namespace lmkit

#endif  // LMKIT_VOCAB_H_
