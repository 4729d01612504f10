// lmkit/params.cc

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

#include "lmkit/params.h"

#include <istream>
#include <ostream>
#include <sstream>

namespace lmkit {

ParamId ParameterVector::Define(const std::string& name, double value,
                                double lo, double hi, ParamGroup group) {
  if (index_.count(name)) {
    throw DataError("parameter defined twice: " + name);
  }
  if (!(lo <= value && value <= hi)) {
    throw DataError("parameter " + name + " initial value outside bounds");
  }
  ParamId id = static_cast<ParamId>(defs_.size());
  defs_.push_back(ParamDef{name, value, lo, hi, group});
  index_.emplace(name, id);
  return id;
}

ParamId ParameterVector::DefineWeight(const std::string& name, double value) {
  return Define(name, value, kRawWeightLo, kRawWeightHi,
                ParamGroup::kInterpolation);
}

ParamId ParameterVector::Find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter: " + name);
  return it->second;
}

bool ParameterVector::Contains(const std::string& name) const {
  return index_.count(name) != 0;
}

void ParameterVector::Set(ParamId id, double value) {
  ParamDef& def = defs_.at(id);
  if (value < def.lo || value > def.hi) {
    throw DataError("parameter " + def.name + " set outside bounds");
  }
  def.value = value;
  ++version_;
}

std::vector<ParamId> ParameterVector::IdsInGroup(ParamGroup group) const {
  std::vector<ParamId> out;
  for (ParamId id = 0; id < defs_.size(); ++id) {
    if (defs_[id].group == group) out.push_back(id);
  }
  return out;
}

std::vector<ParamId> ParameterVector::IdsWithPrefix(
    const std::string& prefix) const {
  std::vector<ParamId> out;
  for (ParamId id = 0; id < defs_.size(); ++id) {
    if (defs_[id].name.rfind(prefix, 0) == 0) out.push_back(id);
  }
  return out;
}

std::vector<ParamId> ParameterVector::AllIds() const {
  std::vector<ParamId> out(defs_.size());
  for (ParamId id = 0; id < defs_.size(); ++id) out[id] = id;
  return out;
}

void ParameterVector::WriteValues(std::ostream& out) const {
  for (const ParamDef& def : defs_) {
    out << def.name << " = " << def.value << '\n';
  }
}

void ParameterVector::ReadValues(std::istream& in) {
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, eq;
    double value;
    if (!(ss >> name >> eq >> value) || eq != "=") {
      throw DataError("parameter file: bad line " + std::to_string(lineno));
    }
    Set(Find(name), value);
  }
}

}  // namespace lmkit
