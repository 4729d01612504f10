// lmkit/patterns.h

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

#ifndef LMKIT_PATTERNS_H_
#define LMKIT_PATTERNS_H_

#include <string>
#include <vector>

#include "lmkit/common.h"

namespace lmkit {

// One context slot: how far back it looks and whether it is the word
// itself or its cluster.  distance 0 with cluster granularity denotes the
// predictive cluster of the word being predicted (used by product models
// of the form P(w | context, W)).
struct PatternSlot {
  uint32_t distance = 1;
  bool cluster = false;

  bool operator==(const PatternSlot&) const = default;
};

// Generalized conditioning context: an ordered slot list whose
// interpolation/backoff ladder drops the leftmost slot first.  The text
// form names positions with letters counted back from the target:
// y = 1 back, x = 2, w = 3, v = 4, u = 5, t = 6 and so on down the
// alphabet; uppercase letters are cluster slots; "Z" is the predictive
// cluster of the target; "_" is a decorative gap marker and is ignored.
//   "x y"      ordinary trigram context
//   "v w _ y"  5-gram context skipping 2-back
//   "x X y Y"  index-clustered trigram context
//   "x y Z"    trigram context plus the target's own cluster
struct ContextPattern {
  std::vector<PatternSlot> slots;

  static ContextPattern Parse(const std::string& text);
  std::string ToString() const;

  uint32_t max_distance() const;
  size_t num_levels() const;  // ladder size: slots dropped one by one + base
  bool has_target_cluster_slot() const;
  // Ladder position at which only the target-cluster slot remains; the
  // ladder never drops below it.  Equals slots.size() when absent.
  size_t bottom_level() const;

  bool operator==(const ContextPattern&) const = default;
};

std::string PatternSlotName(const PatternSlot& slot);

}  // namespace lmkit

#endif  // LMKIT_PATTERNS_H_
