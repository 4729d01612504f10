// lmkit/clustering.cc

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

#include "lmkit/clustering.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace lmkit {

namespace {

inline double NLogN(double n) { return n > 0 ? n * std::log(n) : 0.0; }

// Pseudo-count target outside any real id space.
constexpr TokenId kFakeTarget = 0xfffffffeu;

}  // namespace

ClusterMap::ClusterMap(ClusterKind kind, uint32_t num_clusters,
                       std::vector<uint32_t> assignment)
    : kind_(kind), num_clusters_(num_clusters),
      assignment_(std::move(assignment)) {
  members_.resize(num_clusters_);
  for (TokenId id = 0; id < assignment_.size(); ++id) {
    uint32_t c = assignment_[id];
    if (c == kNoCluster) continue;
    if (c >= num_clusters_) throw DataError("cluster map: id out of range");
    members_[c].push_back(id);
    ++mapped_;
  }
}

ClusterMap ClusterMap::Identity(size_t vocab_size, ClusterKind kind) {
  // The predictive space never contains the begin padding symbol: it is
  // not a predictable event, so its ghost cluster would leak probability
  // mass out of every cluster-target distribution.
  std::vector<uint32_t> assignment(vocab_size, kNoCluster);
  uint32_t next = 0;
  for (size_t i = 0; i < vocab_size; ++i) {
    if (kind == ClusterKind::kPredictive && i == kBegin) continue;
    assignment[i] = next++;
  }
  return ClusterMap(kind, next, std::move(assignment));
}

uint32_t ClusterMap::ClusterOf(TokenId id) const {
  if (id >= assignment_.size() || assignment_[id] == kNoCluster) {
    throw DataError("cluster map: unmapped id " + std::to_string(id));
  }
  return assignment_[id];
}

const std::vector<TokenId>& ClusterMap::Members(uint32_t cluster) const {
  if (cluster >= members_.size()) {
    throw DataError("cluster map: cluster out of range");
  }
  return members_[cluster];
}

void ClusterMap::Write(std::ostream& out, const Vocabulary& vocab) const {
  for (TokenId id = 0; id < assignment_.size(); ++id) {
    if (assignment_[id] == kNoCluster) continue;
    out << vocab.Text(id) << '\t' << assignment_[id] << '\n';
  }
}

ClusterMap ClusterMap::Read(std::istream& in, const Vocabulary& vocab,
                            ClusterKind kind) {
  std::vector<uint32_t> assignment(vocab.size(), kNoCluster);
  uint32_t max_cluster = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("cluster map: missing tab");
    std::string word = line.substr(0, tab);
    uint32_t cluster = static_cast<uint32_t>(std::stoul(line.substr(tab + 1)));
    if (!vocab.Contains(word)) continue;
    assignment[vocab.Lookup(word)] = cluster;
    max_cluster = std::max(max_cluster, cluster);
  }
  return ClusterMap(kind, max_cluster + 1, std::move(assignment));
}

PairCounts BuildPairCounts(const Corpus& corpus, const Vocabulary& vocab,
                           bool predictive, bool add_pseudo_counts) {
  // Collect left -> right adjacency counts over padded bigram events; the
  // predictive variant swaps the roles.
  std::unordered_map<TokenId, std::unordered_map<TokenId, uint64_t>> table;
  for (const Sentence& sent : corpus.sentences) {
    TokenSeq padded = PadSentence(sent, 2);
    for (size_t i = 1; i < padded.size(); ++i) {
      TokenId left = padded[i - 1];
      TokenId right = padded[i];
      if (predictive) std::swap(left, right);
      ++table[left][right];
    }
  }
  PairCounts out;
  if (add_pseudo_counts) {
    for (TokenId id = 0; id < vocab.size(); ++id) ++table[id][kFakeTarget];
  }
  std::vector<TokenId> ids;
  ids.reserve(table.size());
  for (const auto& [id, _] : table) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (TokenId id : ids) {
    ItemCounts item;
    auto& row = table[id];
    item.targets.assign(row.begin(), row.end());
    std::sort(item.targets.begin(), item.targets.end());
    for (const auto& [_, c] : item.targets) item.total += c;
    out.item_ids.push_back(id);
    out.items.push_back(std::move(item));
  }
  return out;
}

PairCounts BuildSentenceBags(const Corpus& corpus) {
  PairCounts out;
  for (size_t i = 0; i < corpus.sentences.size(); ++i) {
    std::map<TokenId, uint64_t> bag;
    for (TokenId t : corpus.sentences[i].tokens) ++bag[t];
    ItemCounts item;
    item.targets.assign(bag.begin(), bag.end());
    for (const auto& [_, c] : item.targets) item.total += c;
    out.item_ids.push_back(static_cast<TokenId>(i));
    out.items.push_back(std::move(item));
  }
  return out;
}

ClusterObjectiveState::ClusterObjectiveState(
    const std::vector<ItemCounts>* items, std::vector<uint32_t> assignment,
    uint32_t num_clusters)
    : items_(items), assignment_(std::move(assignment)) {
  if (assignment_.size() != items_->size()) {
    throw DataError("clustering: assignment/items size mismatch");
  }
  clusters_.resize(num_clusters);
  for (uint32_t i = 0; i < assignment_.size(); ++i) {
    uint32_t c = assignment_[i];
    if (c >= num_clusters) throw DataError("clustering: bad assignment");
    Cluster& cl = clusters_[c];
    ++cl.num_items;
    cl.total += (*items_)[i].total;
    for (const auto& [v, n] : (*items_)[i].targets) cl.counts[v] += n;
  }
  objective_ = 0;
  for (Cluster& cl : clusters_) {
    cl.sum_nlogn = 0;
    for (const auto& [_, n] : cl.counts) {
      cl.sum_nlogn += NLogN(static_cast<double>(n));
    }
    objective_ += ClusterTerm(cl);
  }
}

double ClusterObjectiveState::ClusterTerm(const Cluster& c) const {
  return NLogN(static_cast<double>(c.total)) - c.sum_nlogn;
}

double ClusterObjectiveState::RecomputeObjective() const {
  double obj = 0;
  for (const Cluster& cl : clusters_) {
    double sum = 0;
    for (const auto& [_, n] : cl.counts) sum += NLogN(static_cast<double>(n));
    obj += NLogN(static_cast<double>(cl.total)) - sum;
  }
  return obj;
}

double ClusterObjectiveState::MoveDelta(uint32_t item, uint32_t to) const {
  uint32_t from = assignment_[item];
  if (from == to) return 0.0;
  const ItemCounts& it = (*items_)[item];
  const Cluster& src = clusters_[from];
  const Cluster& dst = clusters_[to];
  double src_nlogn = src.sum_nlogn;
  double dst_nlogn = dst.sum_nlogn;
  for (const auto& [v, n] : it.targets) {
    auto s = src.counts.find(v);
    double sc = s == src.counts.end() ? 0.0 : static_cast<double>(s->second);
    src_nlogn += NLogN(sc - static_cast<double>(n)) - NLogN(sc);
    auto d = dst.counts.find(v);
    double dc = d == dst.counts.end() ? 0.0 : static_cast<double>(d->second);
    dst_nlogn += NLogN(dc + static_cast<double>(n)) - NLogN(dc);
  }
  double before = ClusterTerm(src) + ClusterTerm(dst);
  double after =
      NLogN(static_cast<double>(src.total - it.total)) - src_nlogn +
      NLogN(static_cast<double>(dst.total + it.total)) - dst_nlogn;
  return after - before;
}

void ClusterObjectiveState::ApplyMove(uint32_t item, uint32_t to) {
  uint32_t from = assignment_[item];
  if (from == to) return;
  const ItemCounts& it = (*items_)[item];
  Cluster& src = clusters_[from];
  Cluster& dst = clusters_[to];
  objective_ -= ClusterTerm(src) + ClusterTerm(dst);
  for (const auto& [v, n] : it.targets) {
    uint64_t& sc = src.counts[v];
    src.sum_nlogn += NLogN(static_cast<double>(sc - n)) -
                     NLogN(static_cast<double>(sc));
    sc -= n;
    if (sc == 0) src.counts.erase(v);
    uint64_t& dc = dst.counts[v];
    dst.sum_nlogn += NLogN(static_cast<double>(dc + n)) -
                     NLogN(static_cast<double>(dc));
    dc += n;
  }
  src.total -= it.total;
  dst.total += it.total;
  --src.num_items;
  ++dst.num_items;
  objective_ += ClusterTerm(src) + ClusterTerm(dst);
  assignment_[item] = to;
}

size_t ClusterObjectiveState::SwapPass() {
  size_t moves = 0;
  for (uint32_t item = 0; item < assignment_.size(); ++item) {
    uint32_t from = assignment_[item];
    if (clusters_[from].num_items <= 1) continue;  // keep clusters non-empty
    double best_delta = 0.0;
    uint32_t best = from;
    for (uint32_t c = 0; c < clusters_.size(); ++c) {
      if (c == from) continue;
      double delta = MoveDelta(item, c);
      if (delta < best_delta - 1e-12) {
        best_delta = delta;
        best = c;
      }
    }
    if (best != from) {
      ApplyMove(item, best);
      ++moves;
    }
  }
  return moves;
}

std::vector<uint32_t> SplitClusterBuckshot(
    const std::vector<ItemCounts>& items,
    const std::vector<uint32_t>& member_items, uint64_t seed) {
  size_t n = member_items.size();
  if (n < 2) throw DataError("buckshot: cannot split a singleton cluster");
  std::mt19937_64 rng(seed);
  std::vector<uint32_t> order(member_items.begin(), member_items.end());
  std::shuffle(order.begin(), order.end(), rng);

  // Local subproblem over the member items only.
  std::vector<ItemCounts> local;
  local.reserve(n);
  std::unordered_map<uint32_t, uint32_t> local_of;
  for (uint32_t i = 0; i < n; ++i) {
    local.push_back(items[order[i]]);
    local_of[order[i]] = i;
  }
  // Sides of the not-yet-placed items are parked in a third cluster that
  // never participates in swapping.
  constexpr uint32_t kParked = 2;
  std::vector<uint32_t> side(n, kParked);
  size_t placed = std::min<size_t>(std::min<size_t>(32, n), n);
  for (size_t i = 0; i < placed; ++i) side[i] = static_cast<uint32_t>(i % 2);
  ClusterObjectiveState state(&local, side, 3);

  auto swap_to_convergence = [&](size_t limit) {
    for (size_t pass = 0; pass < 100; ++pass) {
      size_t moves = 0;
      for (uint32_t i = 0; i < limit; ++i) {
        uint32_t from = state.cluster_of(i);
        if (state.cluster_size(from) <= 1) continue;
        uint32_t to = from == 0 ? 1 : 0;
        if (state.MoveDelta(i, to) < -1e-12) {
          state.ApplyMove(i, to);
          ++moves;
        }
      }
      if (moves == 0) break;
    }
  };

  swap_to_convergence(placed);
  while (placed < n) {
    size_t grow = static_cast<size_t>(
        std::ceil(static_cast<double>(placed) * std::sqrt(2.0)));
    grow = std::min(n, std::max(grow, placed + 1));
    for (size_t i = placed; i < grow; ++i) {
      double d0 = state.MoveDelta(static_cast<uint32_t>(i), 0);
      double d1 = state.MoveDelta(static_cast<uint32_t>(i), 1);
      state.ApplyMove(static_cast<uint32_t>(i), d1 < d0 - 1e-12 ? 1 : 0);
    }
    placed = grow;
    swap_to_convergence(placed);
  }

  std::vector<uint32_t> result(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t local_idx = local_of[member_items[i]];
    result[i] = state.cluster_of(local_idx);
  }
  return result;
}

std::vector<uint32_t> ClusterItems(const std::vector<ItemCounts>& items,
                                   uint32_t num_clusters,
                                   const ClusteringOptions& options) {
  if (!IsPowerOfTwo(num_clusters)) {
    throw DataError("clustering: number of clusters must be a power of 2");
  }
  if (num_clusters > items.size()) {
    throw DataError("clustering: more clusters than items");
  }
  std::vector<uint32_t> assignment(items.size(), 0);
  uint32_t current = 1;
  uint64_t salt = 0;
  while (current < num_clusters) {
    // Split every cluster; new ids are old*2 and old*2+1 so ids stay dense.
    std::vector<std::vector<uint32_t>> members(current);
    for (uint32_t i = 0; i < assignment.size(); ++i) {
      members[assignment[i]].push_back(i);
    }
    for (uint32_t c = 0; c < current; ++c) {
      if (members[c].size() < 2) {
        // Too small to split; keep all members on the left side.
        for (uint32_t i : members[c]) assignment[i] = c * 2;
        continue;
      }
      std::vector<uint32_t> sides =
          SplitClusterBuckshot(items, members[c], options.seed + 0x9e37 * ++salt);
      for (size_t k = 0; k < members[c].size(); ++k) {
        assignment[members[c][k]] = c * 2 + sides[k];
      }
    }
    current *= 2;
  }
  // A degenerate split can leave an empty cluster; reseat the largest
  // cluster's extra items deterministically before the swap passes.
  {
    std::vector<std::vector<uint32_t>> members(num_clusters);
    for (uint32_t i = 0; i < assignment.size(); ++i) {
      members[assignment[i]].push_back(i);
    }
    for (uint32_t c = 0; c < num_clusters; ++c) {
      if (!members[c].empty()) continue;
      uint32_t biggest = 0;
      for (uint32_t d = 1; d < num_clusters; ++d) {
        if (members[d].size() > members[biggest].size()) biggest = d;
      }
      if (members[biggest].size() < 2) {
        throw DataError("clustering: cannot keep clusters non-empty");
      }
      uint32_t moved = members[biggest].back();
      members[biggest].pop_back();
      assignment[moved] = c;
      members[c].push_back(moved);
    }
  }
  ClusterObjectiveState state(&items, assignment, num_clusters);
  for (int pass = 0; pass < options.final_swap_iterations; ++pass) {
    if (state.SwapPass() == 0) break;
  }
  return state.assignment();
}

ClusterMap ClusterWords(const PairCounts& pairs, size_t vocab_size,
                        uint32_t num_clusters, ClusterKind kind,
                        const ClusteringOptions& options) {
  std::vector<uint32_t> item_assignment =
      ClusterItems(pairs.items, num_clusters, options);
  std::vector<uint32_t> assignment(vocab_size, kNoCluster);
  for (size_t i = 0; i < pairs.item_ids.size(); ++i) {
    TokenId id = pairs.item_ids[i];
    if (id < vocab_size) assignment[id] = item_assignment[i];
  }
  return ClusterMap(kind, num_clusters, std::move(assignment));
}

void SentenceTypeAssignment::Write(std::ostream& out) const {
  for (size_t i = 0; i < types.size(); ++i) {
    out << i << '\t' << types[i] << '\n';
  }
}

SentenceTypeAssignment SentenceTypeAssignment::Read(std::istream& in) {
  SentenceTypeAssignment a;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    size_t idx;
    uint32_t type;
    if (!(ss >> idx >> type)) throw DataError("sentence-type file: bad line");
    if (idx != a.types.size()) {
      throw DataError("sentence-type file: indices not dense");
    }
    a.types.push_back(type);
    a.num_types = std::max(a.num_types, type + 1);
  }
  return a;
}

SentenceTypeAssignment ClusterSentences(const Corpus& corpus, uint32_t S,
                                        const ClusteringOptions& options) {
  if (!IsPowerOfTwo(S)) {
    throw DataError("sentence clustering: S must be a power of 2");
  }
  if (S > corpus.sentences.size()) {
    throw DataError("sentence clustering: more types than sentences");
  }
  PairCounts bags = BuildSentenceBags(corpus);
  SentenceTypeAssignment out;
  out.types = ClusterItems(bags.items, S, options);
  out.num_types = S;
  return out;
}

}  // namespace lmkit
