// lmkit/presets.h

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

#ifndef LMKIT_PRESETS_H_
#define LMKIT_PRESETS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lmkit/modelspec.h"

namespace lmkit {

// Plain n-gram with the given smoothing ("kn", "katz", "absdisc",
// "interp"), interpolated or backoff mode, single or modified discounts.
ModelSpecNode NgramSpec(uint32_t order, const std::string& smoothing,
                        const std::string& mode = "interp",
                        const std::string& discounts = "single");

// Skipping preset names:
//   skip5-2   5-gram + vw_y + v_xy
//   skip5-3   5-gram + vw_y + v_xy + vwx_
//   skip5-rearranged   5-gram + xvwy + wvxy + yvwx
//   pairs4 / pairs5 / pairs6 / pairs7   all word pairs through that order
ModelSpecNode SkipSpec(const std::string& name, const std::string& smoothing);

// Clustered presets: ibm, fullibm, index, fullibmpredict, indexpredict,
// combinepredict, allcombine, allcombinenotop.  Order is the n-gram order
// of every component (3 = trigram forms from the definitions).
ModelSpecNode ClusterSpec(const std::string& name, uint32_t order,
                          const std::string& smoothing);

// Base model plus a unigram cache and, optionally, the conditional trigram
// cache (gated on the 1-back word appearing in the document so far).
ModelSpecNode CacheSpec(ModelSpecNode base, bool unigram_cache,
                        bool trigram_cache);

// Sentence mixture over S types: per-type children blended with the global
// child via per-type lambdas under priors sigma_0..sigma_S.
ModelSpecNode MixtureSpec(ModelSpecNode global_child, uint32_t S,
                          const std::string& smoothing, uint32_t order);

struct EverythingOptions {
  uint32_t order = 5;
  uint32_t sentence_types = 4;  // 0 = no mixture
  bool skips = true;
  bool caches = true;
  bool tied_type_weights = false;
  bool clusters = true;  // false degenerates the products to word models
  std::string smoothing = "kn";
  bool plus_normal_ngram = false;  // word-level extra 5-gram component
};

// The full combination: a sentence mixture over products of a cluster
// predictor and a word-given-cluster predictor, each interpolating
// sentence-specific, global, skipping and cache components.
ModelSpecNode EverythingSpec(const EverythingOptions& options);

// Resolves a preset name (with options encoded by the caller) or falls
// back to reading a spec file when the name starts with '@'.
ModelSpecNode ResolvePresetOrFile(const std::string& name, uint32_t order,
                                  const std::string& smoothing,
                                  uint32_t sentence_types);

std::vector<std::string> PresetNames();

}  // namespace lmkit

#endif  // LMKIT_PRESETS_H_
