// lmkit/optimize.h

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

#ifndef LMKIT_OPTIMIZE_H_
#define LMKIT_OPTIMIZE_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmkit/model.h"
#include "lmkit/params.h"

namespace lmkit {

struct PowellOptions {
  double tolerance = 1e-4;       // stop when a full cycle improves less
  int max_cycles = 50;
  double line_tolerance = 1e-4;  // golden-section interval tolerance (rel.)
  int max_line_iterations = 60;
};

struct PowellResult {
  double objective = 0;
  int cycles = 0;
  std::vector<double> trace;  // accepted objective after each cycle
};

// Basic Powell direction-set minimization with golden-section line search,
// restricted to the bounding box.  Deterministic; never evaluates outside
// the box; the accepted-objective trace is non-increasing.
PowellResult PowellMinimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double>* x,
    const std::vector<std::pair<double, double>>& bounds,
    const PowellOptions& options = {});

// Heldout/test entropy in bits per scored word: the standard objective.
double HeldoutEntropyObjective(const Model& model, const Corpus& heldout);

struct StageRecord {
  std::string stage;
  int iteration;
  double objective;
};

struct OptimizationSchedule {
  struct Stage {
    std::string name;
    std::vector<ParamId> params;
    const ModelNode* subtree = nullptr;  // nullptr = full model
  };
  std::vector<Stage> stages;
};

// The staging recipe: each component's internal parameters in isolation
// first (evaluating only that subtree), interpolation weights next, then
// one joint stage over everything.
OptimizationSchedule DefaultSchedule(const Model& model);

struct StagedOptions {
  PowellOptions powell;
  // Cycle caps applied to the component / weight stages and the final
  // joint stage separately (joint Powell over everything is slow).
  int component_cycles = 10;
  int joint_cycles = 10;
};

struct StagedResult {
  double objective = 0;
  std::vector<StageRecord> log;
};

// Jointly optimizes model.params against heldout entropy following the
// schedule.  The final stage must cover all free parameters.
StagedResult StagedOptimize(Model* model, const Corpus& heldout,
                            const OptimizationSchedule& schedule,
                            const StagedOptions& options = {});

void WriteOptimizationLog(const std::vector<StageRecord>& log,
                          std::ostream& out);

}  // namespace lmkit

#endif  // LMKIT_OPTIMIZE_H_
