// lmkit/counts.h

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

#ifndef LMKIT_COUNTS_H_
#define LMKIT_COUNTS_H_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lmkit/common.h"

namespace lmkit {

// Which counts a training pass must record so that heldout/test can be
// scored.  Three admission levels, from narrow to wide:
//   key:   one C(context, word) cell plus the context total (enough for
//          simple interpolation, which only divides two counts);
//   row:   every successor of the context with the aggregates (needed by
//          normalizer computations and discount type counts);
//   continuations: like row, plus first-occurrence tracking of the
//          one-longer-left sequences so |{v : C(v.context.w) > 0}| comes
//          out of the same pass (Kneser-Ney lower orders).
class NeededCountsFilter {
 public:
  // Pass-through filter: everything of order <= max_order is recorded.
  static NeededCountsFilter PassThrough();

  void AdmitKey(TokenSpan context, TokenId word);
  void AdmitRow(TokenSpan context);
  void AdmitContinuations(TokenSpan context);

  bool pass_through() const { return pass_through_; }
  bool AdmitsRow(TokenSpan context) const;
  bool AdmitsTotal(TokenSpan context) const;
  bool AdmitsKey(TokenSpan context, TokenId word) const;
  bool WantsContinuations(TokenSpan context) const;
  bool empty() const {
    return !pass_through_ && rows_.empty() && continuation_rows_.empty() &&
           keys_.empty();
  }
  size_t num_rows() const { return rows_.size(); }

 private:
  bool pass_through_ = false;
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> rows_;
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> continuation_rows_;
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> keys_;  // ctx+word
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> totals_;
};

struct SuccessorEntry {
  TokenId word = 0;
  uint64_t count = 0;        // occurrences at predicted positions
  uint32_t continuation = 0; // |{v : C(v . context . word) > 0}|
};

// One context row: every recorded successor plus the aggregates each
// estimator needs.  total is incremented per event, so it equals the row
// sum even when the context itself ends inside sentence padding.  The
// per-band type counts (counts of 1, 2, >= 3) let multi-discount smoothing
// compute its reserved mass without touching the row.
struct CountRow {
  uint64_t total = 0;          // sum of successor counts
  uint32_t types = 0;          // successors with count > 0
  uint64_t continuation_total = 0;
  uint32_t continuation_types = 0;
  uint32_t band_types[3] = {0, 0, 0};       // count == 1, == 2, >= 3
  uint32_t cont_band_types[3] = {0, 0, 0};  // continuation == 1, == 2, >= 3
  std::vector<SuccessorEntry> successors;  // sorted by word id on Finalize

  const SuccessorEntry* Find(TokenId word) const;
};

// Filtered n-gram counts keyed by token-id context, plus continuation
// (left-context diversity) counts.  Two-phase: hash-map rows while
// counting, sorted immutable rows after Finalize.  Finalized stores are
// safe for unsynchronized concurrent reads.
class CountStore {
 public:
  CountStore() = default;
  CountStore(CountStore&& other) noexcept { *this = std::move(other); }
  CountStore& operator=(CountStore&& other) noexcept {
    building_ = std::move(other.building_);
    rows_ = std::move(other.rows_);
    total_events_ = other.total_events_;
    finalized_ = other.finalized_;
    audit_filter_ = std::move(other.audit_filter_);
    audit_violations_.store(other.audit_violations_.load());
    return *this;
  }

  // Counting interface (single writer).
  void AddEvent(TokenSpan context, TokenId word, uint64_t count = 1);
  void AddTotalOnly(TokenSpan context, uint64_t count = 1);
  void AddKeyOnly(TokenSpan context, TokenId word, uint64_t count = 1);
  void AddContinuation(TokenSpan context, TokenId word, uint32_t count = 1);
  void Finalize();

  // Filter-aware event recording: full row, total+key, or nothing.
  void AddFilteredEvent(const NeededCountsFilter& filter, TokenSpan context,
                        TokenId word);

  // Query interface.
  const CountRow* Row(TokenSpan context) const;
  uint64_t Count(TokenSpan context, TokenId word) const;
  uint64_t Count(TokenSpan sequence) const;  // splits off the last token
  uint32_t Continuation(TokenSpan context, TokenId word) const;
  uint64_t ContextTotal(TokenSpan context) const;

  uint64_t total_events() const { return total_events_; }  // N at order 1
  bool finalized() const { return finalized_; }
  size_t num_rows() const { return rows_.size(); }

  // Deterministic shard merge: adds the other store's rows into this one.
  // Both stores must be unfinalized.
  void MergeFrom(const CountStore& other);

  // Instrumentation for the filter-soundness property: when a filter is
  // attached, every row lookup for a missing, non-admitted context bumps
  // the violation counter.
  void AttachFilterAudit(std::shared_ptr<const NeededCountsFilter> filter);
  uint64_t audit_violations() const { return audit_violations_.load(); }

  void Write(std::ostream& out, uint32_t max_order) const;
  static CountStore ReadFrom(std::istream& in);

  template <typename Fn>
  void ForEachRow(Fn&& fn) const {
    for (const auto& [ctx, row] : rows_) fn(ctx, row);
  }

 private:
  struct BuildRow {
    uint64_t total = 0;
    std::unordered_map<TokenId, SuccessorEntry> successors;
  };
  BuildRow& MutableRow(TokenSpan context);

  std::unordered_map<TokenSeq, BuildRow, TokenSeqHash, TokenSeqEq> building_;
  std::unordered_map<TokenSeq, CountRow, TokenSeqHash, TokenSeqEq> rows_;
  uint64_t total_events_ = 0;
  bool finalized_ = false;

  std::shared_ptr<const NeededCountsFilter> audit_filter_;
  mutable std::atomic<uint64_t> audit_violations_{0};
};

// Context-pattern-aware event source: counting and scoring both walk
// sentences through this callback so they stay in lockstep.  The callback
// receives the padded sentence and the first predicted index.
struct SentenceEvents {
  TokenSeq padded;
  uint32_t first_predicted = 0;
};

class Corpus;  // corpus.h
struct Sentence;

// Accumulates word n-gram counts of all orders 1..max_order over padded
// sentences.  With a pass-through filter this is exhaustive counting;
// otherwise only admitted rows are stored.  num_shards > 1 splits the
// corpus into contiguous shards counted in parallel and merged in shard
// order, which is bit-identical to the sequential result.
CountStore AccumulateCounts(const Corpus& corpus,
                            const NeededCountsFilter& filter,
                            uint32_t max_order, unsigned num_shards = 1);

// Count-of-count ratio table for one n-gram order, estimated by hash
// sampling: an n-gram is admitted iff HashTokenSeq(seq) % s == 0, with s a
// power of two grown until the admitted set fits the target window.
struct CountOfCounts {
  uint32_t order = 0;
  uint32_t max_r = 0;
  std::vector<double> n_r;     // indexed 1..max_r+1; n_r[0] unused
  std::vector<double> ratios;  // ratios[r] = n_{r+1}/n_r, r = 1..max_r
  uint64_t sample_size = 0;
  uint64_t sampling_modulus = 1;
  bool exhaustive_fallback = false;  // corpus too small for the target
};

// Incremental hash sampler for one sequence shape.  Observe() every
// occurrence; Extract() the ratio table.  Used for word n-grams and for
// generalized context-pattern sequences alike.
class CountOfCountsSampler {
 public:
  CountOfCountsSampler(uint64_t target_sample, uint32_t max_r)
      : target_(target_sample), max_r_(max_r) {}

  void Observe(TokenSpan sequence);
  CountOfCounts Extract(uint32_t order) const;

 private:
  uint64_t target_;
  uint32_t max_r_;
  uint64_t modulus_ = 1;
  std::unordered_map<TokenSeq, uint64_t, TokenSeqHash, TokenSeqEq> counts_;
};

// Samples count-of-count ratios for every order 1..max_order in one pass.
// target_sample >= 1000; max_r >= 2.  If fewer than target_sample distinct
// n-grams exist at some order, that order falls back to exhaustive n_r and
// sets the fallback flag.
std::vector<CountOfCounts> SampleCountOfCounts(const Corpus& corpus,
                                               uint32_t max_order,
                                               uint64_t target_sample,
                                               uint32_t max_r);

}  // namespace lmkit

#endif  // LMKIT_COUNTS_H_
