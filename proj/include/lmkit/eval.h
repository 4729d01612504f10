// lmkit/eval.h

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

#ifndef LMKIT_EVAL_H_
#define LMKIT_EVAL_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "lmkit/model.h"

namespace lmkit {

struct DocumentStats {
  uint32_t document = 0;
  uint64_t scored = 0;
  double log2_sum = 0;  // sum of log2 P over scored tokens
};

// Entropy/perplexity report for one stream.  perplexity == 2^entropy;
// scored + excluded equals the number of predicted tokens in the stream.
struct EvalReport {
  double entropy_bits = 0;
  double perplexity = 0;
  uint64_t scored_tokens = 0;
  uint64_t excluded_tokens = 0;
  std::vector<DocumentStats> per_document;
  std::string stream_id;

  void WriteCsv(std::ostream& out) const;
  void WriteSummary(std::ostream& out) const;
  static EvalReport ReadCsv(std::istream& in);
};

// Scores every predicted token (boundary symbols included), excludes
// unknown words from the average, resets caches at article boundaries and
// accumulates in a fixed, compensated order.
EvalReport Evaluate(const Model& model, const Corpus& stream,
                    const std::string& stream_id);

// Same but against an arbitrary subtree (staged optimization evaluates
// components in isolation).
EvalReport EvaluateNode(const Model& model, const ModelNode& node,
                        const Corpus& stream, const std::string& stream_id);

struct NormalizationCheck {
  double max_deviation = 0;
  uint64_t positions_checked = 0;
  bool ok = true;
  std::vector<std::string> failures;  // offending context descriptions
};

// Score-everything mode: at checked positions, sums the model probability
// over the whole event space, verifies |sum - 1| <= tolerance and that the
// target word's probability equals normal-mode scoring bit for bit.
// max_positions = 0 checks every position; otherwise a deterministic
// seeded sample of that many positions.
NormalizationCheck VerifyNormalization(const Model& model,
                                       const Corpus& stream,
                                       double tolerance = 1e-9,
                                       uint64_t max_positions = 0,
                                       uint64_t seed = 7);

struct ComparisonReport {
  EvalReport baseline;
  EvalReport candidate;
  double entropy_delta = 0;           // baseline - candidate, bits
  double perplexity_reduction = 0;    // 1 - 2^(-delta), fraction

  void WriteCsv(std::ostream& out) const;
  void WriteSummary(std::ostream& out) const;
};

// Requires both reports to record the same stream identity.
ComparisonReport Compare(const EvalReport& baseline,
                         const EvalReport& candidate);

// Entropy-delta to relative-perplexity-reduction conversion.
double PerplexityReduction(double entropy_delta_bits);

}  // namespace lmkit

#endif  // LMKIT_EVAL_H_
