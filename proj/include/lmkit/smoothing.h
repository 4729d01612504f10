// lmkit/smoothing.h

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

#ifndef LMKIT_SMOOTHING_H_
#define LMKIT_SMOOTHING_H_

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmkit/counts.h"
#include "lmkit/params.h"

namespace lmkit {

enum class SmoothingFamily {
  kSimpleInterp,
  kKatz,
  kAbsoluteDiscount,
  kKneserNey,
};

enum class BackoffMode { kInterpolated, kBackoff };
enum class DiscountKind { kSingle, kModified };

SmoothingFamily ParseSmoothingFamily(const std::string& name);
const char* SmoothingFamilyName(SmoothingFamily family);

// Good-Turing discount table for one n-gram order.  raw(r) is the
// uncorrected (r+1) n_{r+1} / n_r value; discounted(r) applies the standard
// cutoff correction so the zero-count mass is unchanged by truncating the
// discounting at k.  For r > k, discounted(r) == r.
struct DiscountSchedule {
  uint32_t k = 0;
  std::vector<double> raw;        // index 1..k_requested
  std::vector<double> corrected;  // index 1..k
  bool shrunk = false;            // k lowered because ratios were degenerate
  double unseen_mass = 0;         // n_1 / N for the full distribution

  double DiscountedCount(uint64_t r) const {
    if (r == 0 || r > k) return static_cast<double>(r);
    return corrected[r];
  }
  bool discounts_anything() const { return k > 0; }
};

// Builds the schedule: raw disc(r) = (r+1) n_{r+1}/n_r, then the corrected
// counts r * (disc(r)/r - A) / (1 - A) with A = (k+1) n_{k+1} / n_1.  If a
// corrected count leaves (0, r] for any r <= k, k is shrunk and the
// schedule flagged.
DiscountSchedule GoodTuringSchedule(const CountOfCounts& counts, uint32_t k,
                                    uint64_t total_events);

// Bound parameter handles for one estimator.  Discounts are per ladder
// level, level 0 = the leaf's full context.
struct SmootherParams {
  SmoothingFamily family = SmoothingFamily::kKneserNey;
  BackoffMode mode = BackoffMode::kInterpolated;
  DiscountKind discounts = DiscountKind::kSingle;

  std::vector<ParamId> lambda;       // simple interpolation, per level
  std::vector<ParamId> d;            // single discount per level
  std::vector<ParamId> d1, d2, d3;   // modified discounts per level
  ParamId katz_beta = kNoParam;
  ParamId unigram_b = kNoParam;      // shared across families in a run
  ParamId uniform_weight = kNoParam; // shared across families in a run
};

// Creates the family's parameters under the given name prefix, or reuses
// existing definitions with the same names (shared smoothing).
SmootherParams DefineSmootherParams(SmoothingFamily family, BackoffMode mode,
                                    DiscountKind discounts, size_t num_levels,
                                    const std::string& prefix,
                                    ParameterVector* params);

// The backoff ladder of one probability query: contexts from the full
// pattern context down to the bottom.  The spans view a resolution buffer
// owned by the caller and must outlive the query.  space_size is the
// number of events the distribution ranges over (vocabulary less the
// begin symbol, number of clusters, or cluster membership size).
struct Ladder {
  std::vector<TokenSpan> contexts;  // contexts[0] = full, back() = bottom
  uint64_t space_size = 0;
};

// Probability estimator over an immutable CountStore.  Stateless except
// for the per-context normalizer cache used by backoff modes, which is
// version-guarded against parameter changes and idempotent under
// concurrent fills.
class Smoother {
 public:
  Smoother(const CountStore* store, SmootherParams bound,
           const ParameterVector* params);

  // Kneser-Ney only: the top ladder level uses raw counts and lower levels
  // use continuation counts; other families use raw counts throughout.
  double Prob(const Ladder& ladder, TokenId word) const;

  // Attach Good-Turing schedules (Katz only), one per ladder level.
  void SetSchedules(std::vector<DiscountSchedule> schedules);
  const std::vector<DiscountSchedule>& schedules() const { return schedules_; }

  const SmootherParams& bound_params() const { return bound_; }

  // Test hook: poison one cached normalizer to prove the normalization
  // checker catches a broken alpha.
  void CorruptAlphaForTest(const TokenSeq& context, double alpha) const;

 private:
  double LevelProb(const Ladder& ladder, size_t level, TokenId word) const;
  double BaseProb(const Ladder& ladder, TokenId word) const;
  double KnBottomProb(const Ladder& ladder, TokenId word) const;
  double Alpha(const Ladder& ladder, size_t level, const CountRow& row) const;

  double DiscountFor(size_t level, uint64_t count) const;
  double ReservedMass(size_t level, const CountRow& row, bool continuation)
      const;
  // Mass removed from seen events by Good-Turing discounting; cached per
  // context because it only depends on the (fixed) schedule.
  double KatzReservedBase(TokenSpan context, size_t level,
                          const CountRow& row) const;

  const CountStore* store_;
  SmootherParams bound_;
  const ParameterVector* params_;
  std::vector<DiscountSchedule> schedules_;

  struct AlphaCache {
    std::mutex mu;
    uint64_t version = 0;
    std::unordered_map<TokenSeq, double, TokenSeqHash, TokenSeqEq> values;
    std::unordered_map<TokenSeq, double, TokenSeqHash, TokenSeqEq> reserved;
  };
  mutable AlphaCache alpha_cache_;
};

}  // namespace lmkit

#endif  // LMKIT_SMOOTHING_H_
