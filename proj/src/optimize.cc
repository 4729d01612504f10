// lmkit/optimize.cc

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

#include "lmkit/optimize.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <ostream>
#include <set>

#include "lmkit/eval.h"

namespace lmkit {

namespace {

constexpr double kGolden = 0.61803398874989484820;

// Golden-section minimization of g over [lo, hi]; returns the best t
// found, guaranteed no worse than g at either probe or at t=0 when 0 is
// inside the interval.
double GoldenSection(const std::function<double(double)>& g, double lo,
                     double hi, double xtol, int max_iterations,
                     double* best_value) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < max_iterations && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = g(x2);
    }
  }
  double t = f1 < f2 ? x1 : x2;
  double ft = std::min(f1, f2);
  if (lo <= 0 && 0 <= hi) {
    double f0 = g(0);
    if (f0 <= ft) {
      t = 0;
      ft = f0;
    }
  }
  *best_value = ft;
  return t;
}

}  // namespace

PowellResult PowellMinimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double>* x,
    const std::vector<std::pair<double, double>>& bounds,
    const PowellOptions& options) {
  size_t n = x->size();
  if (bounds.size() != n) throw DataError("powell: bounds size mismatch");
  PowellResult result;
  double fx = objective(*x);
  if (!std::isfinite(fx)) {
    throw NumericalError("powell: objective not finite at start");
  }
  if (n == 0) {
    result.objective = fx;
    return result;
  }
  // Direction set starts as the coordinate axes.
  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;

  auto line_minimize = [&](const std::vector<double>& dir, double* f) {
    // Feasible t range keeping x + t*dir inside the box.
    double tlo = -1e308, thi = 1e308;
    for (size_t i = 0; i < n; ++i) {
      if (dir[i] == 0) continue;
      double lo_t = (bounds[i].first - (*x)[i]) / dir[i];
      double hi_t = (bounds[i].second - (*x)[i]) / dir[i];
      if (lo_t > hi_t) std::swap(lo_t, hi_t);
      tlo = std::max(tlo, lo_t);
      thi = std::min(thi, hi_t);
    }
    if (!(tlo <= thi) || (thi - tlo) <= 0) return;
    std::vector<double> probe(*x);
    auto g = [&](double t) {
      for (size_t i = 0; i < n; ++i) {
        probe[i] = std::clamp((*x)[i] + t * dir[i], bounds[i].first,
                              bounds[i].second);
      }
      return objective(probe);
    };
    double xtol = std::max(1e-10, options.line_tolerance * (thi - tlo) * 1e-2);
    double best_f;
    double t = GoldenSection(g, tlo, thi, xtol, options.max_line_iterations,
                             &best_f);
    if (best_f < *f) {
      for (size_t i = 0; i < n; ++i) {
        (*x)[i] = std::clamp((*x)[i] + t * dir[i], bounds[i].first,
                             bounds[i].second);
      }
      *f = best_f;
    }
  };

  for (int cycle = 0; cycle < options.max_cycles; ++cycle) {
    double f_start = fx;
    std::vector<double> x_start(*x);
    double biggest_drop = 0;
    size_t biggest_dir = 0;
    for (size_t d = 0; d < n; ++d) {
      double before = fx;
      line_minimize(dirs[d], &fx);
      if (before - fx > biggest_drop) {
        biggest_drop = before - fx;
        biggest_dir = d;
      }
    }
    // Powell's direction update: try the overall displacement.
    std::vector<double> disp(n);
    bool nonzero = false;
    for (size_t i = 0; i < n; ++i) {
      disp[i] = (*x)[i] - x_start[i];
      if (disp[i] != 0) nonzero = true;
    }
    if (nonzero) {
      double before = fx;
      line_minimize(disp, &fx);
      if (before - fx > biggest_drop) {
        dirs.erase(dirs.begin() + static_cast<long>(biggest_dir));
        dirs.push_back(disp);
      }
    }
    result.trace.push_back(fx);
    ++result.cycles;
    if (f_start - fx < options.tolerance) break;
  }
  result.objective = fx;
  return result;
}

double HeldoutEntropyObjective(const Model& model, const Corpus& heldout) {
  return Evaluate(model, heldout, "heldout").entropy_bits;
}

OptimizationSchedule DefaultSchedule(const Model& model) {
  OptimizationSchedule schedule;
  // Component-internal parameters: one stage per smoothing-parameter
  // prefix (leaves sharing parameters share a stage), each evaluated on a
  // representative leaf in isolation when one exists.  Cache-internal
  // lambdas have no standalone distribution and use the full model.
  std::map<std::string, std::vector<ParamId>> by_prefix;
  for (ParamId id : model.params.IdsInGroup(ParamGroup::kSmoothing)) {
    const std::string& name = model.params.Def(id).name;
    if (name.rfind("shared.", 0) == 0) continue;  // joint stage covers these
    std::string prefix = name.substr(0, name.rfind('.'));
    by_prefix[prefix].push_back(id);
  }
  for (auto& [prefix, ids] : by_prefix) {
    auto it = model.component_roots.find(prefix);
    const ModelNode* subtree =
        it == model.component_roots.end() ? nullptr : it->second;
    schedule.stages.push_back({"component:" + prefix, ids, subtree});
  }
  std::vector<ParamId> weights;
  for (ParamGroup g : {ParamGroup::kInterpolation, ParamGroup::kCacheSchedule,
                       ParamGroup::kPriors}) {
    for (ParamId id : model.params.IdsInGroup(g)) weights.push_back(id);
  }
  if (!weights.empty()) {
    schedule.stages.push_back({"weights", weights, nullptr});
  }
  schedule.stages.push_back({"joint", model.params.AllIds(), nullptr});
  return schedule;
}

StagedResult StagedOptimize(Model* model, const Corpus& heldout,
                            const OptimizationSchedule& schedule,
                            const StagedOptions& options) {
  if (schedule.stages.empty()) throw DataError("staged: empty schedule");
  {
    // The final stage must be joint over all parameters.
    const auto& last = schedule.stages.back();
    if (last.params.size() != model->params.size()) {
      throw DataError("staged: final stage must cover all parameters");
    }
  }
  for (const auto& stage : schedule.stages) {
    for (ParamId id : stage.params) {
      if (id >= model->params.size()) {
        throw DataError("staged: stage '" + stage.name +
                        "' references unknown parameter");
      }
    }
  }
  StagedResult result;
  // Objective memo keyed by the full parameter state and subtree.
  std::map<std::pair<const void*, uint64_t>, double> memo;
  auto param_hash = [&]() {
    uint64_t h = 1469598103934665603ULL;
    for (ParamId id = 0; id < model->params.size(); ++id) {
      double v = model->params.Get(id);
      uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      h = (h ^ bits) * 1099511628211ULL;
    }
    return h;
  };

  int stage_index = 0;
  for (const auto& stage : schedule.stages) {
    bool joint = (&stage == &schedule.stages.back());
    const ModelNode* subtree = stage.subtree;
    PowellOptions popt = options.powell;
    popt.max_cycles = joint ? options.joint_cycles : options.component_cycles;

    std::vector<double> x;
    std::vector<std::pair<double, double>> bounds;
    for (ParamId id : stage.params) {
      x.push_back(model->params.Get(id));
      bounds.emplace_back(model->params.Def(id).lo, model->params.Def(id).hi);
    }
    int iteration = 0;
    auto objective = [&](const std::vector<double>& v) {
      for (size_t i = 0; i < stage.params.size(); ++i) {
        model->params.Set(stage.params[i], v[i]);
      }
      auto key = std::make_pair(static_cast<const void*>(subtree),
                                param_hash());
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      double bits = subtree
                        ? EvaluateNode(*model, *subtree, heldout, "heldout")
                              .entropy_bits
                        : HeldoutEntropyObjective(*model, heldout);
      memo.emplace(key, bits);
      return bits;
    };
    PowellResult pr = PowellMinimize(objective, &x, bounds, popt);
    for (size_t i = 0; i < stage.params.size(); ++i) {
      model->params.Set(stage.params[i], x[i]);
    }
    for (size_t t = 0; t < pr.trace.size(); ++t) {
      result.log.push_back(
          {stage.name, static_cast<int>(t), pr.trace[t]});
    }
    result.objective = pr.objective;
    ++stage_index;
  }
  return result;
}

void WriteOptimizationLog(const std::vector<StageRecord>& log,
                          std::ostream& out) {
  out << "stage,iteration,objective\n";
  for (const StageRecord& r : log) {
    out << r.stage << ',' << r.iteration << ',' << r.objective << '\n';
  }
}

}  // namespace lmkit
