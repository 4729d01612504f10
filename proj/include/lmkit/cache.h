// lmkit/cache.h

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

#ifndef LMKIT_CACHE_H_
#define LMKIT_CACHE_H_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "lmkit/clustering.h"
#include "lmkit/common.h"

namespace lmkit {

// Per-document cache counts: unigram, bigram and trigram tables over the
// words of the current article.  Owned by one evaluation stream; cleared
// exactly at article boundaries.  When a predictive cluster map is given,
// per-cluster unigram totals are maintained for cluster-conditioned cache
// distributions.
class CacheState {
 public:
  explicit CacheState(const ClusterMap* predictive = nullptr)
      : predictive_(predictive) {}

  // Appends a word; w1/w2 are the words one and two back in the running
  // document (kBegin means none, e.g. across sentence starts nothing is
  // skipped: the cache's own history is used).
  void Update(TokenId word);
  void Clear();

  uint64_t total_words() const { return total_; }
  bool Contains(TokenId word) const { return uni_.count(word) != 0; }
  bool ContainsPair(TokenId w2, TokenId w1) const;

  uint64_t UniCount(TokenId word) const;
  uint64_t ClusterUniTotal(uint32_t cluster) const;

  struct Row {
    uint64_t total = 0;
    std::unordered_map<TokenId, uint64_t> counts;
  };
  // Bigram row for context (w1) and trigram row for context (w2, w1);
  // nullptr when the context never occurred in this document.
  const Row* BigramRow(TokenId w1) const;
  const Row* TrigramRow(TokenId w2, TokenId w1) const;

  // Recount oracle used by the cache-correctness property test.
  std::vector<TokenId> HistoryCopy() const { return history_; }

 private:
  const ClusterMap* predictive_;
  std::unordered_map<TokenId, uint64_t> uni_;
  std::unordered_map<uint32_t, uint64_t> cluster_uni_;
  std::unordered_map<TokenId, Row> bi_;
  std::unordered_map<TokenSeq, Row, TokenSeqHash, TokenSeqEq> tri_;
  std::vector<TokenId> history_;
  uint64_t total_ = 0;
};

}  // namespace lmkit

#endif  // LMKIT_CACHE_H_
