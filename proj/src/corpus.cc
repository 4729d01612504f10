// lmkit/corpus.cc

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

#include "lmkit/corpus.h"

#include <fstream>
#include <sstream>

namespace lmkit {

Corpus ReadCorpus(std::istream& text, const Vocabulary& vocab) {
  Corpus corpus;
  std::string line, tok;
  uint32_t doc = 0;
  bool doc_has_content = false;
  while (std::getline(text, line)) {
    Sentence sent;
    sent.document = doc;
    std::istringstream ss(line);
    std::vector<std::string> words;
    while (ss >> tok) words.push_back(tok);
    if (words.empty()) continue;
    if (words.size() == 1 && words[0] == kEndArticleText) {
      sent.tokens = {kEndOfArticle};
      corpus.sentences.push_back(sent);
      corpus.num_tokens += 1;
      ++doc;
      doc_has_content = false;
      continue;
    }
    if (words.size() == 1 && words[0] == kEndParagraphText) {
      sent.tokens = {kEndOfParagraph};
      corpus.sentences.push_back(sent);
      corpus.num_tokens += 1;
      doc_has_content = true;
      continue;
    }
    for (const std::string& w : words) sent.tokens.push_back(vocab.Lookup(w));
    sent.tokens.push_back(kEndOfSentence);
    corpus.num_tokens += sent.tokens.size();
    corpus.sentences.push_back(std::move(sent));
    doc_has_content = true;
  }
  corpus.num_documents = doc + (doc_has_content ? 1 : 0);
  if (corpus.num_documents == 0 && !corpus.sentences.empty()) {
    corpus.num_documents = 1;
  }
  return corpus;
}

Corpus ReadCorpusFile(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return ReadCorpus(in, vocab);
}

namespace {

// Renumbers documents densely within one stream.
void AppendRenumbered(Corpus* stream, const Sentence& sent,
                      uint32_t* last_doc, uint32_t* next_doc) {
  Sentence copy = sent;
  if (stream->sentences.empty() || sent.document != *last_doc) {
    if (!stream->sentences.empty()) ++*next_doc;
    *last_doc = sent.document;
  }
  copy.document = *next_doc;
  stream->sentences.push_back(std::move(copy));
  stream->num_tokens += sent.tokens.size();
}

}  // namespace

CorpusPartition PartitionCorpus(const Corpus& corpus, uint32_t period_k) {
  if (period_k < 2) throw DataError("partition: period must be >= 2");
  if (corpus.sentences.size() < period_k) {
    throw DataError("partition: fewer sentences than one period");
  }
  CorpusPartition part;
  uint32_t heldout_residue = 0;
  uint32_t test_residue = period_k / 2;
  uint32_t last_doc[3] = {~0u, ~0u, ~0u};
  uint32_t next_doc[3] = {0, 0, 0};
  for (size_t i = 0; i < corpus.sentences.size(); ++i) {
    uint32_t r = static_cast<uint32_t>(i % period_k);
    Corpus* stream;
    int which;
    if (r == heldout_residue) {
      stream = &part.heldout;
      which = 1;
    } else if (r == test_residue) {
      stream = &part.test;
      which = 2;
    } else {
      stream = &part.training;
      which = 0;
    }
    AppendRenumbered(stream, corpus.sentences[i], &last_doc[which],
                     &next_doc[which]);
  }
  Corpus* streams[3] = {&part.training, &part.heldout, &part.test};
  for (int i = 0; i < 3; ++i) {
    streams[i]->num_documents =
        streams[i]->sentences.empty() ? 0 : next_doc[i] + 1;
  }
  return part;
}

TokenSeq PadSentence(const Sentence& sentence, uint32_t order) {
  TokenSeq padded;
  uint32_t pad = order > 0 ? order - 1 : 0;
  padded.reserve(pad + sentence.tokens.size());
  padded.assign(pad, kBegin);
  padded.insert(padded.end(), sentence.tokens.begin(), sentence.tokens.end());
  return padded;
}

}  // namespace lmkit
