// lmkit/cache.cc

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

#include "lmkit/cache.h"

#include "lmkit/vocab.h"

namespace lmkit {

void CacheState::Update(TokenId word) {
  if (history_.size() >= 1) {
    TokenId w1 = history_.back();
    Row& b = bi_[w1];
    ++b.total;
    ++b.counts[word];
    if (history_.size() >= 2) {
      TokenId w2 = history_[history_.size() - 2];
      Row& t = tri_[TokenSeq{w2, w1}];
      ++t.total;
      ++t.counts[word];
    }
  }
  ++uni_[word];
  ++total_;
  if (predictive_) ++cluster_uni_[predictive_->ClusterOf(word)];
  history_.push_back(word);
}

void CacheState::Clear() {
  uni_.clear();
  cluster_uni_.clear();
  bi_.clear();
  tri_.clear();
  history_.clear();
  total_ = 0;
}

bool CacheState::ContainsPair(TokenId w2, TokenId w1) const {
  auto it = tri_.find(TokenSeq{w2, w1});
  return it != tri_.end() && it->second.total > 0;
}

uint64_t CacheState::UniCount(TokenId word) const {
  auto it = uni_.find(word);
  return it == uni_.end() ? 0 : it->second;
}

uint64_t CacheState::ClusterUniTotal(uint32_t cluster) const {
  auto it = cluster_uni_.find(cluster);
  return it == cluster_uni_.end() ? 0 : it->second;
}

const CacheState::Row* CacheState::BigramRow(TokenId w1) const {
  auto it = bi_.find(w1);
  return it == bi_.end() ? nullptr : &it->second;
}

const CacheState::Row* CacheState::TrigramRow(TokenId w2, TokenId w1) const {
  auto it = tri_.find(TokenSeq{w2, w1});
  return it == tri_.end() ? nullptr : &it->second;
}

}  // namespace lmkit
