// lmkit/smoothing.cc

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

#include "lmkit/smoothing.h"

#include <algorithm>
#include <cmath>

namespace lmkit {

SmoothingFamily ParseSmoothingFamily(const std::string& name) {
  if (name == "interp" || name == "simple") return SmoothingFamily::kSimpleInterp;
  if (name == "katz") return SmoothingFamily::kKatz;
  if (name == "absdisc" || name == "abs") return SmoothingFamily::kAbsoluteDiscount;
  if (name == "kn" || name == "kneser-ney") return SmoothingFamily::kKneserNey;
  throw DataError("unknown smoothing family: " + name);
}

const char* SmoothingFamilyName(SmoothingFamily family) {
  switch (family) {
    case SmoothingFamily::kSimpleInterp: return "interp";
    case SmoothingFamily::kKatz: return "katz";
    case SmoothingFamily::kAbsoluteDiscount: return "absdisc";
    case SmoothingFamily::kKneserNey: return "kn";
  }
  return "?";
}

DiscountSchedule GoodTuringSchedule(const CountOfCounts& counts, uint32_t k,
                                    uint64_t total_events) {
  DiscountSchedule sch;
  if (counts.n_r.size() < 2) throw DataError("good-turing: empty table");
  uint32_t k_req = std::min<uint32_t>(k, counts.max_r);
  sch.raw.assign(k_req + 1, 0.0);
  for (uint32_t r = 1; r <= k_req; ++r) {
    sch.raw[r] = (r + 1) * counts.ratios[r];
  }
  sch.unseen_mass =
      total_events > 0 ? counts.n_r[1] / static_cast<double>(total_events) : 0;
  // Shrink k until every corrected count lies in (0, r].
  for (uint32_t kk = k_req;; --kk) {
    if (kk == 0) {
      sch.k = 0;
      sch.shrunk = true;
      sch.corrected.assign(1, 0.0);
      return sch;
    }
    bool ok = counts.n_r[1] > 0 && counts.n_r[kk + 1] >= 0;
    double a = ok ? (kk + 1) * counts.n_r[kk + 1] / counts.n_r[1] : 1.0;
    if (!(a >= 0) || a >= 1.0) ok = false;
    std::vector<double> corrected(kk + 1, 0.0);
    if (ok) {
      for (uint32_t r = 1; r <= kk && ok; ++r) {
        if (counts.ratios[r] <= 0) {
          ok = false;
          break;
        }
        double dr = ((r + 1) * counts.ratios[r] / r - a) / (1.0 - a);
        corrected[r] = dr * r;
        if (!(corrected[r] > 0) || corrected[r] > r) ok = false;
      }
    }
    if (ok) {
      sch.k = kk;
      sch.corrected = std::move(corrected);
      sch.shrunk = (kk != k_req);
      return sch;
    }
  }
}

namespace {

constexpr double kDiscountMax = 1.0 - 1e-6;

ParamId DefineOrReuse(ParameterVector* params, const std::string& name,
                      double value, double lo, double hi, ParamGroup group) {
  if (params->Contains(name)) return params->Find(name);
  return params->Define(name, value, lo, hi, group);
}

}  // namespace

SmootherParams DefineSmootherParams(SmoothingFamily family, BackoffMode mode,
                                    DiscountKind discounts, size_t num_levels,
                                    const std::string& prefix,
                                    ParameterVector* params) {
  SmootherParams p;
  p.family = family;
  p.mode = mode;
  p.discounts = discounts;
  p.unigram_b = DefineOrReuse(params, "shared.b", 0.05, 0.0, 1e3,
                              ParamGroup::kSmoothing);
  p.uniform_weight = DefineOrReuse(params, "shared.uniform", 1e-4, 0.0, 1.0,
                                   ParamGroup::kSmoothing);
  auto def = [&](const std::string& suffix, double value, double lo,
                 double hi) {
    return DefineOrReuse(params, prefix + suffix, value, lo, hi,
                         ParamGroup::kSmoothing);
  };
  switch (family) {
    case SmoothingFamily::kSimpleInterp:
      for (size_t l = 0; l + 1 < num_levels; ++l) {
        p.lambda.push_back(
            def(".l" + std::to_string(l), 0.5, 0.0, 1.0));
      }
      break;
    case SmoothingFamily::kKatz:
      p.katz_beta = def(".beta", 0.5, 1e-6, 100.0);
      break;
    case SmoothingFamily::kAbsoluteDiscount:
      for (size_t l = 0; l + 1 < num_levels; ++l) {
        p.d.push_back(def(".d" + std::to_string(l), 0.5, 0.0, kDiscountMax));
      }
      break;
    case SmoothingFamily::kKneserNey:
      for (size_t l = 0; l < num_levels; ++l) {
        std::string ls = std::to_string(l);
        if (discounts == DiscountKind::kSingle) {
          p.d.push_back(def(".d" + ls, 0.5, 0.0, kDiscountMax));
        } else {
          p.d1.push_back(def(".d1_" + ls, 0.5, 0.0, kDiscountMax));
          p.d2.push_back(def(".d2_" + ls, 0.5, 0.0, kDiscountMax));
          p.d3.push_back(def(".d3_" + ls, 0.5, 0.0, kDiscountMax));
        }
      }
      break;
  }
  return p;
}

Smoother::Smoother(const CountStore* store, SmootherParams bound,
                   const ParameterVector* params)
    : store_(store), bound_(std::move(bound)), params_(params) {}

void Smoother::SetSchedules(std::vector<DiscountSchedule> schedules) {
  schedules_ = std::move(schedules);
  std::lock_guard<std::mutex> lock(alpha_cache_.mu);
  alpha_cache_.values.clear();
  alpha_cache_.reserved.clear();
  alpha_cache_.version = 0;
}

double Smoother::KatzReservedBase(TokenSpan context, size_t level,
                                  const CountRow& row) const {
  {
    std::lock_guard<std::mutex> lock(alpha_cache_.mu);
    auto it = alpha_cache_.reserved.find(context);
    if (it != alpha_cache_.reserved.end()) return it->second;
  }
  const DiscountSchedule& sch = schedules_.at(level);
  double reserved = 0.0;
  for (const SuccessorEntry& e : row.successors) {
    if (e.count == 0) continue;
    reserved += e.count - sch.DiscountedCount(e.count);
  }
  std::lock_guard<std::mutex> lock(alpha_cache_.mu);
  alpha_cache_.reserved.emplace(TokenSeq(context.begin(), context.end()),
                                reserved);
  return reserved;
}

double Smoother::DiscountFor(size_t level, uint64_t count) const {
  if (count == 0) return 0.0;
  if (bound_.discounts == DiscountKind::kModified) {
    size_t band = count >= 3 ? 2 : count - 1;
    const std::vector<ParamId>* v =
        band == 0 ? &bound_.d1 : (band == 1 ? &bound_.d2 : &bound_.d3);
    return params_->Get((*v)[level]);
  }
  return params_->Get(bound_.d[level]);
}

double Smoother::ReservedMass(size_t level, const CountRow& row,
                              bool continuation) const {
  const uint32_t* bands = continuation ? row.cont_band_types : row.band_types;
  if (bound_.discounts == DiscountKind::kModified) {
    return params_->Get(bound_.d1[level]) * bands[0] +
           params_->Get(bound_.d2[level]) * bands[1] +
           params_->Get(bound_.d3[level]) * bands[2];
  }
  double d = params_->Get(bound_.d[level]);
  return d * (bands[0] + bands[1] + bands[2]);
}

double Smoother::BaseProb(const Ladder& ladder, TokenId word) const {
  TokenSpan ctx = ladder.contexts.back();
  const CountRow* row = store_->Row(ctx);
  double b = params_->Get(bound_.unigram_b);
  double u = params_->Get(bound_.uniform_weight);
  double v = static_cast<double>(ladder.space_size);
  uint64_t total = row ? row->total : 0;
  double additive;
  if (total == 0 && b <= 0) {
    additive = 1.0 / v;
  } else {
    const SuccessorEntry* e = row ? row->Find(word) : nullptr;
    double count = e ? static_cast<double>(e->count) : 0.0;
    additive = (count + b) / (static_cast<double>(total) + b * v);
  }
  return (1.0 - u) * additive + u / v;
}

// Kneser-Ney bottom level: continuation counts with additive b, the
// discount-reserved mass closed with the uniform distribution, then the
// shared uniform mix on top.
double Smoother::KnBottomProb(const Ladder& ladder, TokenId word) const {
  TokenSpan ctx = ladder.contexts.back();
  size_t level = ladder.contexts.size() - 1;
  const CountRow* row = store_->Row(ctx);
  double b = params_->Get(bound_.unigram_b);
  double u = params_->Get(bound_.uniform_weight);
  double v = static_cast<double>(ladder.space_size);
  uint64_t denom0 = row ? row->continuation_total : 0;
  double p0;
  if (denom0 == 0 && b <= 0) {
    p0 = 1.0 / v;
  } else {
    const SuccessorEntry* e = row ? row->Find(word) : nullptr;
    double cont = e ? static_cast<double>(e->continuation) : 0.0;
    double discounted =
        std::max(cont - DiscountFor(level, e ? e->continuation : 0), 0.0);
    double den = static_cast<double>(denom0) + b * v;
    double reserved = row ? ReservedMass(level, *row, /*continuation=*/true)
                          : 0.0;
    p0 = (discounted + b) / den + (reserved / den) * (1.0 / v);
  }
  return (1.0 - u) * p0 + u / v;
}

double Smoother::Alpha(const Ladder& ladder, size_t level,
                       const CountRow& row) const {
  TokenSpan ctx = ladder.contexts[level];
  {
    std::lock_guard<std::mutex> lock(alpha_cache_.mu);
    if (alpha_cache_.version != params_->version()) {
      alpha_cache_.values.clear();
      alpha_cache_.version = params_->version();
    }
    auto it = alpha_cache_.values.find(ctx);
    if (it != alpha_cache_.values.end()) return it->second;
  }
  bool top = (level == 0);
  bool kn = bound_.family == SmoothingFamily::kKneserNey;
  bool cont_level = kn && !top;
  double total = cont_level ? static_cast<double>(row.continuation_total)
                            : static_cast<double>(row.total);
  double sum_disc = 0.0;
  double sum_lower = 0.0;
  double beta = 0.0;
  if (bound_.family == SmoothingFamily::kKatz) {
    const DiscountSchedule& sch = schedules_.at(level);
    double reserved_base = KatzReservedBase(ctx, level, row);
    beta = reserved_base > 0 ? 0.0 : params_->Get(bound_.katz_beta);
    for (const SuccessorEntry& e : row.successors) {
      if (e.count == 0) continue;
      sum_disc += beta > 0 ? e.count / (total + beta)
                           : sch.DiscountedCount(e.count) / total;
      sum_lower += LevelProb(ladder, level + 1, e.word);
    }
  } else {
    // Absolute discounting or Kneser-Ney, backoff mode.
    for (const SuccessorEntry& e : row.successors) {
      uint64_t num = cont_level ? e.continuation : e.count;
      if (num == 0) continue;
      sum_disc += (num - DiscountFor(level, num)) / total;
      sum_lower += LevelProb(ladder, level + 1, e.word);
    }
  }
  double alpha;
  double unseen_lower = 1.0 - sum_lower;
  if (unseen_lower < 1e-12) {
    // Every event in the space is seen in this context; there is nothing to
    // back off to, so the seen probabilities are renormalized instead.
    // Encoded as a negative cache entry carrying the renormalizer.
    alpha = -1.0 / sum_disc;
  } else {
    alpha = (1.0 - sum_disc) / unseen_lower;
  }
  std::lock_guard<std::mutex> lock(alpha_cache_.mu);
  if (alpha_cache_.version == params_->version()) {
    alpha_cache_.values.emplace(TokenSeq(ctx.begin(), ctx.end()), alpha);
  }
  return alpha;
}

void Smoother::CorruptAlphaForTest(const TokenSeq& context,
                                   double alpha) const {
  std::lock_guard<std::mutex> lock(alpha_cache_.mu);
  alpha_cache_.version = params_->version();
  alpha_cache_.values[context] = alpha;
}

double Smoother::LevelProb(const Ladder& ladder, size_t level,
                           TokenId word) const {
  size_t bottom = ladder.contexts.size() - 1;
  if (level >= bottom) {
    if (bound_.family == SmoothingFamily::kKneserNey && bottom > 0) {
      return KnBottomProb(ladder, word);
    }
    return BaseProb(ladder, word);
  }
  const CountRow* row = store_->Row(ladder.contexts[level]);
  bool top = (level == 0);
  bool kn = bound_.family == SmoothingFamily::kKneserNey;
  bool cont_level = kn && !top;
  uint64_t denom_u = row == nullptr
                         ? 0
                         : (cont_level ? row->continuation_total : row->total);
  if (denom_u == 0) return LevelProb(ladder, level + 1, word);
  double denom = static_cast<double>(denom_u);
  const SuccessorEntry* e = row->Find(word);
  uint64_t num = e == nullptr ? 0 : (cont_level ? e->continuation : e->count);

  switch (bound_.family) {
    case SmoothingFamily::kSimpleInterp: {
      double lam = params_->Get(bound_.lambda[level]);
      double ml = (e ? static_cast<double>(e->count) : 0.0) / denom;
      return lam * ml + (1.0 - lam) * LevelProb(ladder, level + 1, word);
    }
    case SmoothingFamily::kKatz: {
      const DiscountSchedule& sch = schedules_.at(level);
      double reserved_base =
          KatzReservedBase(ladder.contexts[level], level, *row);
      double beta = reserved_base > 0 ? 0.0 : params_->Get(bound_.katz_beta);
      if (num > 0) {
        double p = beta > 0 ? num / (denom + beta)
                            : sch.DiscountedCount(num) / denom;
        double alpha = Alpha(ladder, level, *row);
        if (alpha < 0) p *= -alpha;  // no unseen events: renormalize
        return p;
      }
      double alpha = Alpha(ladder, level, *row);
      if (alpha < 0) return 0.0;
      return alpha * LevelProb(ladder, level + 1, word);
    }
    case SmoothingFamily::kAbsoluteDiscount:
    case SmoothingFamily::kKneserNey: {
      double d_num = num > 0 ? std::max(num - DiscountFor(level, num), 0.0) / denom
                             : 0.0;
      if (bound_.mode == BackoffMode::kInterpolated) {
        double reserved = ReservedMass(level, *row, cont_level);
        return d_num +
               (reserved / denom) * LevelProb(ladder, level + 1, word);
      }
      if (num > 0) {
        double alpha = Alpha(ladder, level, *row);
        if (alpha < 0) return d_num * (-alpha);
        return d_num;
      }
      double alpha = Alpha(ladder, level, *row);
      if (alpha < 0) return 0.0;
      return alpha * LevelProb(ladder, level + 1, word);
    }
  }
  return 0.0;
}

double Smoother::Prob(const Ladder& ladder, TokenId word) const {
  if (ladder.contexts.empty() || ladder.space_size == 0) {
    throw DataError("smoother: empty ladder");
  }
  return LevelProb(ladder, 0, word);
}

}  // namespace lmkit
