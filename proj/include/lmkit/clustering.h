// lmkit/clustering.h

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

#ifndef LMKIT_CLUSTERING_H_
#define LMKIT_CLUSTERING_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmkit/common.h"
#include "lmkit/corpus.h"

namespace lmkit {

enum class ClusterKind { kConditional, kPredictive, kSentence };

constexpr uint32_t kNoCluster = 0xffffffffu;

// Hard word -> cluster assignment.  Lookup of an unmapped id is an error.
class ClusterMap {
 public:
  ClusterMap() = default;
  ClusterMap(ClusterKind kind, uint32_t num_clusters,
             std::vector<uint32_t> assignment /* indexed by TokenId */);

  // Identity map: every id is its own cluster (degenerate, for reductions).
  static ClusterMap Identity(size_t vocab_size, ClusterKind kind);

  uint32_t ClusterOf(TokenId id) const;
  const std::vector<TokenId>& Members(uint32_t cluster) const;
  uint32_t num_clusters() const { return num_clusters_; }
  ClusterKind kind() const { return kind_; }
  size_t mapped_size() const { return mapped_; }

  void Write(std::ostream& out, const Vocabulary& vocab) const;
  static ClusterMap Read(std::istream& in, const Vocabulary& vocab,
                         ClusterKind kind);

 private:
  ClusterKind kind_ = ClusterKind::kConditional;
  uint32_t num_clusters_ = 0;
  size_t mapped_ = 0;
  std::vector<uint32_t> assignment_;
  std::vector<std::vector<TokenId>> members_;
};

// One clustered item: a sparse vector of successor (or bag-of-word) counts.
struct ItemCounts {
  uint64_t total = 0;
  std::vector<std::pair<TokenId, uint64_t>> targets;  // sorted by id
};

struct PairCounts {
  std::vector<TokenId> item_ids;   // word id of each item
  std::vector<ItemCounts> items;
};

// Adjacent-pair counts for word clustering.  Conditional clustering groups
// the context word of each bigram event; predictive clustering feeds the
// reversed pairs through the same engine.  When add_pseudo_counts is set,
// every vocabulary id receives one co-occurrence with a fake target so
// unsupported words cluster together and the resulting map is total.
PairCounts BuildPairCounts(const Corpus& corpus, const Vocabulary& vocab,
                           bool predictive, bool add_pseudo_counts);

// Bag-of-words items, one per sentence, for sentence-type clustering.
PairCounts BuildSentenceBags(const Corpus& corpus);

// Exchange-clustering state: per-cluster aggregate counts and the cached
// objective sum_W [C(W) ln C(W) - sum_v C(Wv) ln C(Wv)], the count-weighted
// conditional entropy in nats.  Lower is better.
class ClusterObjectiveState {
 public:
  ClusterObjectiveState(const std::vector<ItemCounts>* items,
                        std::vector<uint32_t> assignment,
                        uint32_t num_clusters);

  double objective() const { return objective_; }
  double RecomputeObjective() const;  // full recomputation oracle

  // Exact objective change of moving an item; touches only the item's
  // targets plus the two cluster totals.  Zero for a no-op move.
  double MoveDelta(uint32_t item, uint32_t to) const;
  void ApplyMove(uint32_t item, uint32_t to);

  uint32_t cluster_of(uint32_t item) const { return assignment_[item]; }
  uint32_t num_clusters() const { return static_cast<uint32_t>(clusters_.size()); }
  uint32_t cluster_size(uint32_t cluster) const {
    return clusters_[cluster].num_items;
  }
  const std::vector<uint32_t>& assignment() const { return assignment_; }

  // One best-move pass per iteration over all items, in item order; a move
  // is taken only if it strictly lowers the objective (ties keep the
  // current cluster; equal alternatives resolve to the lowest cluster id).
  // Moves that would empty a cluster are skipped.  Returns moves made.
  size_t SwapPass();

 private:
  struct Cluster {
    uint64_t total = 0;
    uint32_t num_items = 0;
    double sum_nlogn = 0;  // sum_v S(v) ln S(v)
    std::unordered_map<TokenId, uint64_t> counts;
  };
  double ClusterTerm(const Cluster& c) const;

  const std::vector<ItemCounts>* items_;
  std::vector<uint32_t> assignment_;
  std::vector<Cluster> clusters_;
  double objective_ = 0;
};

// Splits the members of one cluster in two with the Buckshot strategy:
// seed with a small shuffled sample split round-robin, swap to
// convergence, then grow the sample by sqrt(2), greedily placing each new
// item, until all members are placed.  Returns a 0/1 side per member.
std::vector<uint32_t> SplitClusterBuckshot(
    const std::vector<ItemCounts>& items,
    const std::vector<uint32_t>& member_items, uint64_t seed);

struct ClusteringOptions {
  uint64_t seed = 1;
  int final_swap_iterations = 4;
  bool add_pseudo_counts = true;
};

// Top-down entropy clustering to num_clusters (a power of two), then the
// final swap passes.  Returns the assignment aligned with items.
std::vector<uint32_t> ClusterItems(const std::vector<ItemCounts>& items,
                                   uint32_t num_clusters,
                                   const ClusteringOptions& options);

// Word clustering: conditional (objective P(w_i | W_{i-1})) or predictive
// (same engine on reversed pairs).
ClusterMap ClusterWords(const PairCounts& pairs, size_t vocab_size,
                        uint32_t num_clusters, ClusterKind kind,
                        const ClusteringOptions& options);

struct SentenceTypeAssignment {
  std::vector<uint32_t> types;  // per sentence index
  uint32_t num_types = 0;

  void Write(std::ostream& out) const;
  static SentenceTypeAssignment Read(std::istream& in);
};

SentenceTypeAssignment ClusterSentences(const Corpus& corpus, uint32_t S,
                                        const ClusteringOptions& options);

}  // namespace lmkit

#endif  // LMKIT_CLUSTERING_H_
