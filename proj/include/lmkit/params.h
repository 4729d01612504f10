// lmkit/params.h

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

#ifndef LMKIT_PARAMS_H_
#define LMKIT_PARAMS_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmkit/common.h"

namespace lmkit {

using ParamId = uint32_t;
constexpr ParamId kNoParam = std::numeric_limits<ParamId>::max();

enum class ParamGroup {
  kSmoothing,
  kInterpolation,  // raw weights, renormalized over active components
  kCacheSchedule,
  kPriors,
};

struct ParamDef {
  std::string name;
  double value = 0;
  double lo = 0;
  double hi = 1;
  ParamGroup group = ParamGroup::kSmoothing;
};

// Named free parameters with bounds.  Interpolation weights are stored raw
// in [kRawWeightLo, kRawWeightHi] and renormalized wherever they are read,
// so the search box stays unconstrained.  version() changes on every write
// and lets per-context normalizer caches invalidate themselves.
class ParameterVector {
 public:
  static constexpr double kRawWeightLo = 1e-6;
  static constexpr double kRawWeightHi = 1e3;

  ParamId Define(const std::string& name, double value, double lo, double hi,
                 ParamGroup group);
  ParamId DefineWeight(const std::string& name, double value = 1.0);

  ParamId Find(const std::string& name) const;  // throws on unknown name
  bool Contains(const std::string& name) const;

  double Get(ParamId id) const { return defs_[id].value; }
  void Set(ParamId id, double value);
  const ParamDef& Def(ParamId id) const { return defs_[id]; }
  size_t size() const { return defs_.size(); }
  uint64_t version() const { return version_; }

  std::vector<ParamId> IdsInGroup(ParamGroup group) const;
  std::vector<ParamId> IdsWithPrefix(const std::string& prefix) const;
  std::vector<ParamId> AllIds() const;

  // Text form: one "name = value" per line.
  void WriteValues(std::ostream& out) const;
  void ReadValues(std::istream& in);

 private:
  std::vector<ParamDef> defs_;
  std::unordered_map<std::string, ParamId> index_;
  uint64_t version_ = 1;
};

}  // namespace lmkit

#endif  // LMKIT_PARAMS_H_
