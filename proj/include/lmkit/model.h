// lmkit/model.h

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

#ifndef LMKIT_MODEL_H_
#define LMKIT_MODEL_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmkit/cache.h"
#include "lmkit/clustering.h"
#include "lmkit/counts.h"
#include "lmkit/modelspec.h"
#include "lmkit/params.h"
#include "lmkit/patterns.h"
#include "lmkit/smoothing.h"
#include "lmkit/vocab.h"

namespace lmkit {

enum class TargetKind { kWord, kCluster };

// Per-sentence scratch for sentence mixtures: running per-type log weights
// ln(sigma_j * prod q_j) plus a memo of the per-type word probabilities of
// the most recently scored word.
struct MixtureScratch {
  std::vector<double> log_w;
  std::vector<double> memo_q;
  TokenId memo_word = 0;
  bool memo_valid = false;
  bool active = false;
};

// Everything a probability query needs to see: the padded sentence, the
// target position, and the evaluation stream's mutable adjuncts.
struct EvalContext {
  const TokenSeq* padded = nullptr;
  uint32_t position = 0;
  CacheState* cache = nullptr;
  MixtureScratch* mixture = nullptr;

  TokenId Back(uint32_t distance) const { return (*padded)[position - distance]; }
};

// A node of the model composition tree.  Prob always takes the real word
// id; cluster-target nodes map it through the predictive cluster map.
// Trees are immutable after construction; all per-stream mutability lives
// in the EvalContext.
class ModelNode {
 public:
  virtual ~ModelNode() = default;

  virtual double Prob(const EvalContext& ctx, TokenId word) const = 0;
  virtual bool Active(const EvalContext& ctx) const { return true; }

  // Cache components carry weight schedules instead of static weights.
  virtual bool has_dynamic_weight() const { return false; }
  virtual double DynamicWeight(const EvalContext& ctx) const {
    throw DataError("node has no dynamic weight");
  }

  virtual TargetKind target_kind() const { return TargetKind::kWord; }
  virtual uint32_t MaxDistance() const = 0;

  // Sentence-level hooks (sentence mixtures keep running products).
  virtual void StartSentence(EvalContext& ctx) const {}
  virtual void Advance(EvalContext& ctx, TokenId word) const {}

  // Needed-counts scan: admit into each leaf's filter whatever this event's
  // probability query will consult.
  virtual void CollectNeeded(const EvalContext& ctx, TokenId word) const {}
};

// A counting unit: one context pattern (possibly serving several leaves
// whose patterns are suffixes of it), an optional sentence-type
// restriction, its filter, and its counts.
struct PatternStore {
  ContextPattern pattern;
  TargetKind target = TargetKind::kWord;
  int type_restriction = -1;  // -1 = global, else sentence type id
  NeededCountsFilter filter;
  CountStore store;
  bool needs_continuations = false;  // any KN leaf reads this store
  bool needs_katz = false;
  std::vector<CountOfCounts> katz_tables;  // per ladder level
};

// Shared ingredients handed to the builder.
struct ModelResources {
  const Vocabulary* vocab = nullptr;
  std::shared_ptr<const ClusterMap> conditional;
  std::shared_ptr<const ClusterMap> predictive;
  std::shared_ptr<const SentenceTypeAssignment> sentence_types;
};

class LeafNode;  // defined in model.cc

// A trained model: the resources, the parameter vector, the pattern stores
// and the composition tree, ready for evaluation.
struct Model {
  ModelResources resources;
  ParameterVector params;
  std::vector<std::unique_ptr<PatternStore>> stores;
  std::unique_ptr<ModelNode> root;
  ModelSpecNode spec;
  uint32_t max_distance = 1;
  // Smoothing-parameter prefix -> a representative leaf, for staged
  // optimization of component-internal parameters in isolation.
  std::map<std::string, const ModelNode*> component_roots;

  MixtureScratch MakeMixtureScratch() const;
  CacheState MakeCacheState() const {
    return CacheState(resources.predictive.get());
  }
  bool uses_cache = false;
  bool uses_mixture = false;

  // The first predicted index of a padded sentence.
  uint32_t pad() const { return max_distance; }
  TokenSeq Pad(const Sentence& s) const { return PadSentence(s, max_distance + 1); }
};

struct TrainOptions {
  // Pass-through counting (no needed-counts filtering).
  bool exhaustive = false;
  uint64_t count_of_counts_target = 25000;
  uint32_t katz_cutoff = 5;
  unsigned num_shards = 1;
};

// Builds the tree from its declarative spec, scans heldout+test for needed
// counts, accumulates training counts for every pattern store, and returns
// the ready model.  heldout/test may be empty only with exhaustive
// counting.
Model BuildModel(const ModelSpecNode& spec, const ModelResources& resources,
                 const Corpus& training, const Corpus* heldout,
                 const Corpus* test, const TrainOptions& options);

// Free-standing sentence mixture probability per its defining equation:
// sum_j sigma_j prod_i [lambda_j P_j(w_i) + (1 - lambda_j) P_global(w_i)],
// with type 0 the global model on both sides.  Priors must sum to 1.
double SentenceMixtureProb(
    const std::vector<double>& priors /* sigma_0..sigma_S */,
    const std::vector<double>& lambdas /* lambda_1..lambda_S */,
    const std::vector<std::vector<double>>& per_type_word_probs /* [S][N] */,
    const std::vector<double>& global_word_probs /* [N] */);

}  // namespace lmkit

#endif  // LMKIT_MODEL_H_
