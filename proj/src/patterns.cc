// lmkit/patterns.cc

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

#include "lmkit/patterns.h"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lmkit {

ContextPattern ContextPattern::Parse(const std::string& text) {
  ContextPattern pattern;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    if (tok == "_") continue;
    if (tok.size() != 1) {
      throw DataError("pattern: bad slot token '" + tok + "'");
    }
    char c = tok[0];
    bool cluster = std::isupper(static_cast<unsigned char>(c)) != 0;
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (base < 'f' || base > 'z') {
      throw DataError("pattern: bad slot letter '" + tok + "'");
    }
    uint32_t distance = static_cast<uint32_t>('z' - base);
    if (distance == 0 && !cluster) {
      throw DataError("pattern: 'z' denotes the target itself");
    }
    pattern.slots.push_back(PatternSlot{distance, cluster});
  }
  if (pattern.slots.size() > 19) {
    throw DataError("pattern: more than 19 slots");
  }
  for (size_t i = 0; i < pattern.slots.size(); ++i) {
    if (pattern.slots[i].distance == 0 && i + 1 != pattern.slots.size()) {
      throw DataError("pattern: target-cluster slot must be last");
    }
  }
  return pattern;
}

std::string PatternSlotName(const PatternSlot& slot) {
  char base = static_cast<char>('z' - slot.distance);
  if (slot.cluster) base = static_cast<char>(std::toupper(base));
  return std::string(1, base);
}

std::string ContextPattern::ToString() const {
  std::string out;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (i) out.push_back(' ');
    out += PatternSlotName(slots[i]);
  }
  return out;
}

uint32_t ContextPattern::max_distance() const {
  uint32_t d = 0;
  for (const PatternSlot& s : slots) d = std::max(d, s.distance);
  return d;
}

bool ContextPattern::has_target_cluster_slot() const {
  return !slots.empty() && slots.back().distance == 0;
}

size_t ContextPattern::bottom_level() const {
  return has_target_cluster_slot() ? slots.size() - 1 : slots.size();
}

size_t ContextPattern::num_levels() const { return bottom_level() + 1; }

}  // namespace lmkit
