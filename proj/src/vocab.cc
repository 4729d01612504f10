// lmkit/vocab.cc

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

#include "lmkit/vocab.h"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace lmkit {

const char* const kUnknownText = "<unk>";
const char* const kEndSentenceText = "</s>";
const char* const kEndParagraphText = "<p>";
const char* const kEndArticleText = "<art>";
const char* const kBeginText = "<s>";

Vocabulary::Vocabulary() {
  // Order must match SpecialToken.
  for (const char* text : {kUnknownText, kEndSentenceText, kEndParagraphText,
                           kEndArticleText, kBeginText}) {
    TokenId id = static_cast<TokenId>(words_.size());
    words_.emplace_back(text);
    index_.emplace(text, id);
  }
}

TokenId Vocabulary::Add(const std::string& word) {
  auto it = index_.find(word);
  if (it != index_.end()) {
    if (it->second < kNumSpecials) {
      throw DataError("vocabulary: collision with special symbol: " + word);
    }
    return it->second;
  }
  TokenId id = static_cast<TokenId>(words_.size());
  words_.push_back(word);
  index_.emplace(word, id);
  return id;
}

TokenId Vocabulary::Lookup(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocabulary::Contains(const std::string& word) const {
  return index_.count(word) != 0;
}

const std::string& Vocabulary::Text(TokenId id) const {
  if (id >= words_.size()) throw DataError("vocabulary: id out of range");
  return words_[id];
}

void Vocabulary::Write(std::ostream& out) const {
  for (size_t id = 0; id < words_.size(); ++id) {
    out << words_[id] << '\t' << id << '\n';
  }
}

Vocabulary Vocabulary::Read(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary file: missing tab on line " +
                      std::to_string(lineno));
    }
    std::string word = line.substr(0, tab);
    TokenId id = static_cast<TokenId>(std::stoul(line.substr(tab + 1)));
    if (id < kNumSpecials) {
      if (vocab.Text(id) != word) {
        throw DataError("vocabulary file: special id " + std::to_string(id) +
                        " bound to '" + word + "'");
      }
      continue;
    }
    TokenId got = vocab.Add(word);
    if (got != id) {
      throw DataError("vocabulary file: ids not dense at line " +
                      std::to_string(lineno));
    }
  }
  return vocab;
}

Vocabulary BuildVocabulary(std::istream& text,
                           const VocabularyConfig& config) {
  // std::map keeps insertion deterministic regardless of hash order.
  std::map<std::string, uint64_t> freq;
  std::vector<std::string> first_seen;
  std::string line, tok;
  bool any = false;
  while (std::getline(text, line)) {
    std::istringstream ss(line);
    while (ss >> tok) {
      any = true;
      if (tok == kEndParagraphText || tok == kEndArticleText) continue;
      if (freq[tok]++ == 0) first_seen.push_back(tok);
    }
  }
  if (!any) throw DataError("vocabulary: empty token stream");
  Vocabulary vocab;
  for (const std::string& w : first_seen) {
    if (freq[w] >= config.min_count) vocab.Add(w);
  }
  return vocab;
}

}  // namespace lmkit
