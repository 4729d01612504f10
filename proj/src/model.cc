// lmkit/model.cc

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

#include "lmkit/model.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace lmkit {

namespace {

bool IsSuffixOf(const std::vector<PatternSlot>& small,
                const std::vector<PatternSlot>& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Leaf

class LeafNode : public ModelNode {
 public:
  LeafNode(ContextPattern pattern, TargetKind target, int type_restriction,
           SmootherParams smoother_params, std::string param_prefix,
           const ModelResources& resources)
      : pattern_(std::move(pattern)),
        target_(target),
        type_restriction_(type_restriction),
        smoother_params_(std::move(smoother_params)),
        param_prefix_(std::move(param_prefix)),
        cond_(resources.conditional.get()),
        pred_(resources.predictive.get()) {
    for (const PatternSlot& slot : pattern_.slots) {
      if (slot.cluster && slot.distance > 0 && cond_ == nullptr) {
        throw DataError("leaf '" + pattern_.ToString() +
                        "': no conditional cluster map");
      }
      if (slot.cluster && slot.distance == 0 && pred_ == nullptr) {
        throw DataError("leaf '" + pattern_.ToString() +
                        "': no predictive cluster map");
      }
    }
    if (target_ == TargetKind::kCluster && pred_ == nullptr) {
      throw DataError("cluster-target leaf: no predictive cluster map");
    }
  }

  void BindStore(PatternStore* store, const ParameterVector* params) {
    store_ = store;
    smoother_.emplace(&store->store, smoother_params_, params);
  }

  void FinishTraining() {
    if (smoother_params_.family != SmoothingFamily::kKatz) return;
    // Schedules are indexed by ladder level; the store's tables are per
    // context length, which survives store sharing by pattern suffix.
    std::vector<DiscountSchedule> schedules;
    size_t levels = pattern_.num_levels();
    for (size_t level = 0; level + 1 < levels; ++level) {
      size_t len = ContextLengthAt(level);
      schedules.push_back(GoodTuringSchedule(
          store_->katz_tables.at(len), katz_cutoff_, store_->store.total_events()));
    }
    smoother_->SetSchedules(std::move(schedules));
  }

  void set_katz_cutoff(uint32_t k) { katz_cutoff_ = k; }

  double Prob(const EvalContext& ctx, TokenId word) const override {
    TokenSeq values;
    Ladder ladder;
    Resolve(ctx, word, &values, &ladder);
    return smoother_->Prob(ladder, EventId(word));
  }

  void CollectNeeded(const EvalContext& ctx, TokenId word) const override {
    TokenSeq values;
    Ladder ladder;
    Resolve(ctx, word, &values, &ladder);
    TokenId event = EventId(word);
    NeededCountsFilter& filter = store_->filter;
    bool kn = smoother_params_.family == SmoothingFamily::kKneserNey;
    bool keys_only =
        smoother_params_.family == SmoothingFamily::kSimpleInterp;
    for (size_t level = 0; level < ladder.contexts.size(); ++level) {
      TokenSpan c = ladder.contexts[level];
      if (keys_only) {
        filter.AdmitKey(c, event);
      } else if (kn && level > 0) {
        filter.AdmitContinuations(c);
      } else {
        filter.AdmitRow(c);
      }
    }
  }

  uint32_t MaxDistance() const override {
    return std::max<uint32_t>(1, pattern_.max_distance());
  }

  TargetKind target_kind() const override { return target_; }
  const ContextPattern& pattern() const { return pattern_; }
  int type_restriction() const { return type_restriction_; }
  const std::string& param_prefix() const { return param_prefix_; }
  const SmootherParams& smoother_params() const { return smoother_params_; }
  const Smoother* smoother() const {
    return smoother_ ? &*smoother_ : nullptr;
  }
  PatternStore* pattern_store() const { return store_; }

  // Event-space members at a given context (for normalization sweeps).
  uint64_t SpaceSize(TokenId word) const {
    switch (target_) {
      case TargetKind::kCluster:
        return pred_->num_clusters();
      case TargetKind::kWord:
        if (pattern_.has_target_cluster_slot()) {
          return pred_->Members(pred_->ClusterOf(word)).size();
        }
        return vocab_event_size_;
    }
    return 0;
  }

  void set_vocab_event_size(uint64_t n) { vocab_event_size_ = n; }

 private:
  size_t ContextLengthAt(size_t level) const {
    return pattern_.slots.size() - level;
  }

  TokenId EventId(TokenId word) const {
    return target_ == TargetKind::kCluster ? pred_->ClusterOf(word) : word;
  }

  void Resolve(const EvalContext& ctx, TokenId word, TokenSeq* values,
               Ladder* ladder) const {
    const auto& slots = pattern_.slots;
    values->resize(slots.size());
    for (size_t k = 0; k < slots.size(); ++k) {
      const PatternSlot& slot = slots[k];
      if (slot.distance == 0) {
        (*values)[k] = pred_->ClusterOf(word);
      } else if (slot.cluster) {
        (*values)[k] = cond_->ClusterOf(ctx.Back(slot.distance));
      } else {
        (*values)[k] = ctx.Back(slot.distance);
      }
    }
    size_t bottom = pattern_.bottom_level();
    ladder->contexts.clear();
    for (size_t level = 0; level <= bottom; ++level) {
      ladder->contexts.push_back(
          TokenSpan(values->data() + level, slots.size() - level));
    }
    ladder->space_size = SpaceSize(word);
  }

  ContextPattern pattern_;
  TargetKind target_;
  int type_restriction_;
  SmootherParams smoother_params_;
  std::string param_prefix_;
  const ClusterMap* cond_;
  const ClusterMap* pred_;
  PatternStore* store_ = nullptr;
  std::optional<Smoother> smoother_;
  uint64_t vocab_event_size_ = 0;
  uint32_t katz_cutoff_ = 5;
};

// ---------------------------------------------------------------------------
// Interpolation

class InterpolateNode : public ModelNode {
 public:
  struct Child {
    std::unique_ptr<ModelNode> node;
    ParamId weight = kNoParam;  // kNoParam => dynamic (cache schedule)
  };

  InterpolateNode(std::vector<Child> children, const ParameterVector* params)
      : children_(std::move(children)), params_(params) {
    if (children_.empty()) throw DataError("interpolate: no children");
    for (const Child& c : children_) {
      max_distance_ = std::max(max_distance_, c.node->MaxDistance());
    }
    target_ = children_.front().node->target_kind();
    for (const Child& c : children_) {
      if (c.node->target_kind() != target_) {
        throw DataError("interpolate: children disagree on target kind");
      }
    }
  }

  double Prob(const EvalContext& ctx, TokenId word) const override {
    double total = 0;
    double acc = 0;
    bool any = false;
    for (const Child& c : children_) {
      if (!c.node->Active(ctx) || !ChildUsable(c, ctx, word)) continue;
      double w = c.weight == kNoParam ? c.node->DynamicWeight(ctx)
                                      : params_->Get(c.weight);
      if (w <= 0) continue;
      total += w;
      acc += w * c.node->Prob(ctx, word);
      any = true;
    }
    if (!any || total <= 0) {
      throw NumericalError("interpolation: all components inactive");
    }
    return acc / total;
  }

  void CollectNeeded(const EvalContext& ctx, TokenId word) const override {
    for (const Child& c : children_) c.node->CollectNeeded(ctx, word);
  }

  uint32_t MaxDistance() const override { return max_distance_; }
  TargetKind target_kind() const override { return target_; }

  const std::vector<Child>& children() const { return children_; }

 private:
  // Cluster-conditioned cache components gate per target cluster.
  bool ChildUsable(const Child& c, const EvalContext& ctx,
                   TokenId word) const;

  std::vector<Child> children_;
  const ParameterVector* params_;
  TargetKind target_ = TargetKind::kWord;
  uint32_t max_distance_ = 1;
};

// ---------------------------------------------------------------------------
// Product (cluster predict x word given cluster)

class ProductNode : public ModelNode {
 public:
  ProductNode(std::unique_ptr<ModelNode> cluster_factor,
              std::unique_ptr<ModelNode> word_factor)
      : cluster_(std::move(cluster_factor)), word_(std::move(word_factor)) {
    if (cluster_->target_kind() != TargetKind::kCluster) {
      throw DataError("product: first factor must predict clusters");
    }
    if (word_->target_kind() != TargetKind::kWord) {
      throw DataError("product: second factor must predict words");
    }
  }

  double Prob(const EvalContext& ctx, TokenId word) const override {
    return cluster_->Prob(ctx, word) * word_->Prob(ctx, word);
  }

  void CollectNeeded(const EvalContext& ctx, TokenId word) const override {
    cluster_->CollectNeeded(ctx, word);
    word_->CollectNeeded(ctx, word);
  }

  uint32_t MaxDistance() const override {
    return std::max(cluster_->MaxDistance(), word_->MaxDistance());
  }

 private:
  std::unique_ptr<ModelNode> cluster_;
  std::unique_ptr<ModelNode> word_;
};

// ---------------------------------------------------------------------------
// Cache components

enum class CacheComponentKind { kUnigram, kBigram, kTrigram };

class CacheNode : public ModelNode {
 public:
  CacheNode(CacheComponentKind kind, TargetKind target, bool conditioned,
            const ClusterMap* predictive, const ParameterVector* params,
            ParamId start, ParamId mult, ParamId maxwords, ParamId lam_tri,
            ParamId lam_bi)
      : kind_(kind),
        target_(target),
        conditioned_(conditioned),
        pred_(predictive),
        params_(params),
        start_(start),
        mult_(mult),
        maxwords_(maxwords),
        lam_tri_(lam_tri),
        lam_bi_(lam_bi) {
    if ((conditioned_ || target_ == TargetKind::kCluster) && !pred_) {
      throw DataError("cache: cluster use requires a predictive map");
    }
  }

  bool Active(const EvalContext& ctx) const override {
    if (!ctx.cache || ctx.cache->total_words() == 0) return false;
    switch (kind_) {
      case CacheComponentKind::kUnigram:
        return true;
      case CacheComponentKind::kBigram:
      case CacheComponentKind::kTrigram:
        // Gated on the 1-back word having been seen in this document.
        return ctx.cache->Contains(ctx.Back(1));
    }
    return false;
  }

  // Cluster-conditioned components additionally need cache support inside
  // the target's cluster.
  bool UsableForWord(const EvalContext& ctx, TokenId word) const {
    if (!conditioned_) return true;
    return ctx.cache->ClusterUniTotal(pred_->ClusterOf(word)) > 0;
  }

  bool has_dynamic_weight() const override { return true; }

  double DynamicWeight(const EvalContext& ctx) const override {
    double start = params_->Get(start_);
    double mult = params_->Get(mult_);
    double maxw = params_->Get(maxwords_);
    double n = static_cast<double>(ctx.cache->total_words());
    return start + mult * std::min(n, maxw) / maxw;
  }

  double Prob(const EvalContext& ctx, TokenId word) const override {
    const CacheState& cache = *ctx.cache;
    switch (kind_) {
      case CacheComponentKind::kUnigram:
        return UniProb(cache, word);
      case CacheComponentKind::kBigram:
        return NgramProb(cache, ctx, word, /*order=*/2);
      case CacheComponentKind::kTrigram:
        return NgramProb(cache, ctx, word, /*order=*/3);
    }
    return 0;
  }

  uint32_t MaxDistance() const override {
    return kind_ == CacheComponentKind::kTrigram ? 2 : 1;
  }
  TargetKind target_kind() const override { return target_; }

 private:
  double UniProb(const CacheState& cache, TokenId word) const {
    if (target_ == TargetKind::kCluster) {
      return static_cast<double>(cache.ClusterUniTotal(pred_->ClusterOf(word))) /
             static_cast<double>(cache.total_words());
    }
    if (conditioned_) {
      uint64_t denom = cache.ClusterUniTotal(pred_->ClusterOf(word));
      return static_cast<double>(cache.UniCount(word)) /
             static_cast<double>(denom);
    }
    return static_cast<double>(cache.UniCount(word)) /
           static_cast<double>(cache.total_words());
  }

  // Row numerator/denominator under the component's target semantics.
  void RowStats(const CacheState::Row& row, TokenId word, uint32_t cluster,
                double* num, double* denom) const {
    if (target_ == TargetKind::kCluster) {
      double n = 0;
      for (const auto& [w, c] : row.counts) {
        if (pred_->ClusterOf(w) == cluster) n += static_cast<double>(c);
      }
      *num = n;
      *denom = static_cast<double>(row.total);
      return;
    }
    if (conditioned_) {
      double d = 0;
      for (const auto& [w, c] : row.counts) {
        if (pred_->ClusterOf(w) == cluster) d += static_cast<double>(c);
      }
      auto it = row.counts.find(word);
      *num = it == row.counts.end() ? 0.0 : static_cast<double>(it->second);
      *denom = d;
      return;
    }
    auto it = row.counts.find(word);
    *num = it == row.counts.end() ? 0.0 : static_cast<double>(it->second);
    *denom = static_cast<double>(row.total);
  }

  // Simple-interpolation smoothing over the cache tables, falling through
  // levels whose context is absent from the document.
  double NgramProb(const CacheState& cache, const EvalContext& ctx,
                   TokenId word, int order) const {
    uint32_t cluster =
        (conditioned_ || target_ == TargetKind::kCluster)
            ? pred_->ClusterOf(word)
            : 0;
    double p = UniProb(cache, word);
    const CacheState::Row* bi = cache.BigramRow(ctx.Back(1));
    if (bi) {
      double num, denom;
      RowStats(*bi, word, cluster, &num, &denom);
      if (denom > 0) {
        double lam = params_->Get(lam_bi_);
        p = lam * (num / denom) + (1 - lam) * p;
      }
    }
    if (order >= 3) {
      const CacheState::Row* tri = cache.TrigramRow(ctx.Back(2), ctx.Back(1));
      if (tri) {
        double num, denom;
        RowStats(*tri, word, cluster, &num, &denom);
        if (denom > 0) {
          double lam = params_->Get(lam_tri_);
          p = lam * (num / denom) + (1 - lam) * p;
        }
      }
    }
    return p;
  }

  CacheComponentKind kind_;
  TargetKind target_;
  bool conditioned_;
  const ClusterMap* pred_;
  const ParameterVector* params_;
  ParamId start_, mult_, maxwords_, lam_tri_, lam_bi_;
};

bool InterpolateNode::ChildUsable(const Child& c, const EvalContext& ctx,
                                  TokenId word) const {
  if (const auto* cache = dynamic_cast<const CacheNode*>(c.node.get())) {
    return cache->UsableForWord(ctx, word);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Sentence mixture

class SentenceMixtureNode : public ModelNode {
 public:
  SentenceMixtureNode(std::unique_ptr<ModelNode> global,
                      std::vector<std::unique_ptr<ModelNode>> per_type,
                      std::vector<ParamId> priors, std::vector<ParamId> lambdas,
                      const ParameterVector* params)
      : global_(std::move(global)),
        per_type_(std::move(per_type)),
        priors_(std::move(priors)),
        lambdas_(std::move(lambdas)),
        params_(params) {
    if (priors_.size() != per_type_.size() + 1) {
      throw DataError("mixture: need S+1 priors");
    }
    max_distance_ = global_->MaxDistance();
    for (const auto& n : per_type_) {
      max_distance_ = std::max(max_distance_, n->MaxDistance());
    }
  }

  size_t num_types() const { return per_type_.size(); }

  void StartSentence(EvalContext& ctx) const override {
    MixtureScratch* s = ctx.mixture;
    if (!s) throw DataError("mixture: evaluation without scratch state");
    size_t n = per_type_.size() + 1;
    s->log_w.assign(n, 0.0);
    double total = 0;
    std::vector<double> raw(n);
    for (size_t j = 0; j < n; ++j) {
      raw[j] = params_->Get(priors_[j]);
      total += raw[j];
    }
    if (total <= 0) throw NumericalError("mixture: zero prior mass");
    for (size_t j = 0; j < n; ++j) s->log_w[j] = std::log(raw[j] / total);
    s->memo_valid = false;
    s->active = true;
  }

  double Prob(const EvalContext& ctx, TokenId word) const override {
    MixtureScratch* s = ctx.mixture;
    if (!s || !s->active) {
      throw DataError("mixture: StartSentence not called");
    }
    std::vector<double>& q = s->memo_q;
    ComponentProbs(ctx, word, &q);
    s->memo_word = word;
    s->memo_valid = true;
    double max_lw = s->log_w[0];
    for (double lw : s->log_w) max_lw = std::max(max_lw, lw);
    double num = 0, denom = 0;
    for (size_t j = 0; j < q.size(); ++j) {
      double w = std::exp(s->log_w[j] - max_lw);
      num += w * q[j];
      denom += w;
    }
    return num / denom;
  }

  void Advance(EvalContext& ctx, TokenId word) const override {
    MixtureScratch* s = ctx.mixture;
    if (!s || !s->active) return;
    std::vector<double> local;
    std::vector<double>* q = &s->memo_q;
    if (!s->memo_valid || s->memo_word != word) {
      ComponentProbs(ctx, word, &local);
      q = &local;
    }
    for (size_t j = 0; j < q->size(); ++j) {
      s->log_w[j] += std::log((*q)[j]);
    }
    s->memo_valid = false;
  }

  void CollectNeeded(const EvalContext& ctx, TokenId word) const override {
    global_->CollectNeeded(ctx, word);
    for (const auto& n : per_type_) n->CollectNeeded(ctx, word);
  }

  uint32_t MaxDistance() const override { return max_distance_; }

 private:
  // q_0 = global; q_j = lambda_j P_j + (1-lambda_j) P_global (or P_j alone
  // when the mixture was built without per-type blending).
  void ComponentProbs(const EvalContext& ctx, TokenId word,
                      std::vector<double>* q) const {
    size_t n = per_type_.size() + 1;
    q->resize(n);
    double pg = global_->Prob(ctx, word);
    (*q)[0] = pg;
    for (size_t j = 1; j < n; ++j) {
      double pj = per_type_[j - 1]->Prob(ctx, word);
      if (lambdas_.empty()) {
        (*q)[j] = pj;
      } else {
        double lam = params_->Get(lambdas_[j - 1]);
        (*q)[j] = lam * pj + (1 - lam) * pg;
      }
    }
  }

  std::unique_ptr<ModelNode> global_;
  std::vector<std::unique_ptr<ModelNode>> per_type_;
  std::vector<ParamId> priors_;
  std::vector<ParamId> lambdas_;  // empty => per-type children used directly
  const ParameterVector* params_;
  uint32_t max_distance_ = 1;
};

double SentenceMixtureProb(
    const std::vector<double>& priors,
    const std::vector<double>& lambdas,
    const std::vector<std::vector<double>>& per_type_word_probs,
    const std::vector<double>& global_word_probs) {
  double sum = 0;
  for (double s : priors) sum += s;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("sentence mixture: priors do not sum to 1");
  }
  if (priors.size() != per_type_word_probs.size() + 1 ||
      lambdas.size() != per_type_word_probs.size()) {
    throw DataError("sentence mixture: inconsistent sizes");
  }
  double total = 0;
  size_t num_words = global_word_probs.size();
  for (size_t j = 0; j < priors.size(); ++j) {
    double prod = 1.0;
    for (size_t i = 0; i < num_words; ++i) {
      double pg = global_word_probs[i];
      double p = j == 0 ? pg
                        : lambdas[j - 1] * per_type_word_probs[j - 1][i] +
                              (1 - lambdas[j - 1]) * pg;
      prod *= p;
    }
    total += priors[j] * prod;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Builder

namespace {

struct BuildState {
  const ModelResources* resources;
  ParameterVector* params;
  std::vector<LeafNode*> leaves;
  std::vector<std::pair<CacheNode*, bool>> caches;  // node, (unused)
  bool has_mixture = false;
  size_t mixture_types = 0;
  int counter = 0;

  std::string FreshName(const std::string& stem) {
    return stem + std::to_string(counter++);
  }
};

std::unique_ptr<ModelNode> BuildNode(const ModelSpecNode& spec,
                                     BuildState* state);

std::unique_ptr<ModelNode> BuildLeaf(const ModelSpecNode& spec,
                                     BuildState* state) {
  ContextPattern pattern = ContextPattern::Parse(spec.RequiredAttr("pattern"));
  TargetKind target = spec.Attr("predict", "word") == "cluster"
                          ? TargetKind::kCluster
                          : TargetKind::kWord;
  int type = -1;
  std::string type_attr = spec.Attr("type", "global");
  if (type_attr != "global") type = std::stoi(type_attr);

  SmoothingFamily family = ParseSmoothingFamily(spec.Attr("smoothing", "kn"));
  BackoffMode mode = spec.Attr("mode", "interp") == "backoff"
                         ? BackoffMode::kBackoff
                         : BackoffMode::kInterpolated;
  DiscountKind discounts = spec.Attr("discounts", "single") == "modified"
                               ? DiscountKind::kModified
                               : DiscountKind::kSingle;
  // Smoothing parameters default to sharing across sentence types (and
  // across leaves with the same pattern shape) to keep the search space
  // proportionate to the heldout data.
  std::string prefix = spec.HasAttr("params")
                           ? spec.attrs.at("params")
                           : std::string(SmoothingFamilyName(family)) + "(" +
                                 pattern.ToString() + (target == TargetKind::kCluster ? "|C" : "") + ")";
  SmootherParams sp =
      DefineSmootherParams(family, mode, discounts, pattern.num_levels(),
                           prefix, state->params);
  auto leaf = std::make_unique<LeafNode>(std::move(pattern), target, type, sp,
                                         prefix, *state->resources);
  leaf->set_vocab_event_size(state->resources->vocab->event_size());
  state->leaves.push_back(leaf.get());
  return leaf;
}

std::unique_ptr<ModelNode> BuildCache(const ModelSpecNode& spec,
                                      BuildState* state) {
  std::string kind_attr = spec.RequiredAttr("kind");
  CacheComponentKind kind;
  if (kind_attr == "unigram") {
    kind = CacheComponentKind::kUnigram;
  } else if (kind_attr == "bigram") {
    kind = CacheComponentKind::kBigram;
  } else if (kind_attr == "trigram") {
    kind = CacheComponentKind::kTrigram;
  } else {
    throw DataError("cache: unknown kind '" + kind_attr + "'");
  }
  TargetKind target = spec.Attr("predict", "word") == "cluster"
                          ? TargetKind::kCluster
                          : TargetKind::kWord;
  bool conditioned = spec.Attr("conditioned", "false") == "true";
  std::string prefix = spec.HasAttr("params")
                           ? spec.attrs.at("params")
                           : state->FreshName("cache" + kind_attr);
  auto defp = [&](const std::string& s, double v, double lo, double hi,
                  ParamGroup g) {
    std::string name = prefix + s;
    if (state->params->Contains(name)) return state->params->Find(name);
    return state->params->Define(name, v, lo, hi, g);
  };
  ParamId start = defp(".start", 1.0, ParameterVector::kRawWeightLo,
                       ParameterVector::kRawWeightHi, ParamGroup::kCacheSchedule);
  ParamId mult = defp(".mult", 0.0, 0.0, ParameterVector::kRawWeightHi,
                      ParamGroup::kCacheSchedule);
  ParamId maxw = defp(".maxwords", 1e6, 100.0, 1e6, ParamGroup::kCacheSchedule);
  ParamId lt = kNoParam, lb = kNoParam;
  if (kind != CacheComponentKind::kUnigram) {
    lt = defp(".lt", 0.4, 0.0, 1.0, ParamGroup::kSmoothing);
    lb = defp(".lb", 0.4, 0.0, 1.0, ParamGroup::kSmoothing);
  }
  auto node = std::make_unique<CacheNode>(
      kind, target, conditioned, state->resources->predictive.get(),
      state->params, start, mult, maxw, lt, lb);
  state->caches.emplace_back(node.get(), true);
  return node;
}

std::unique_ptr<ModelNode> BuildInterpolate(const ModelSpecNode& spec,
                                            BuildState* state) {
  std::string name =
      spec.HasAttr("name") ? spec.attrs.at("name") : state->FreshName("mix");
  std::vector<InterpolateNode::Child> children;
  int i = 0;
  for (const ModelSpecNode& child_spec : spec.children) {
    InterpolateNode::Child child;
    child.node = BuildNode(child_spec, state);
    if (child.node->has_dynamic_weight()) {
      child.weight = kNoParam;
    } else {
      std::string wname = name + ".w" + std::to_string(i);
      child.weight = state->params->Contains(wname)
                         ? state->params->Find(wname)
                         : state->params->DefineWeight(wname);
    }
    children.push_back(std::move(child));
    ++i;
  }
  return std::make_unique<InterpolateNode>(std::move(children), state->params);
}

std::unique_ptr<ModelNode> BuildProduct(const ModelSpecNode& spec,
                                        BuildState* state) {
  if (spec.children.size() != 2) {
    throw DataError("product: exactly two factors required");
  }
  auto cluster = BuildNode(spec.children[0], state);
  auto word = BuildNode(spec.children[1], state);
  return std::make_unique<ProductNode>(std::move(cluster), std::move(word));
}

std::unique_ptr<ModelNode> BuildMixture(const ModelSpecNode& spec,
                                        BuildState* state) {
  if (state->has_mixture) {
    throw DataError("mixture: only one sentence mixture per model");
  }
  state->has_mixture = true;
  if (spec.children.empty()) throw DataError("mixture: no children");
  size_t S = spec.children.size() - 1;
  state->mixture_types = S;
  std::string name =
      spec.HasAttr("name") ? spec.attrs.at("name") : state->FreshName("sen");
  bool blend = spec.Attr("blend", "true") == "true";
  auto global = BuildNode(spec.children[0], state);
  std::vector<std::unique_ptr<ModelNode>> per_type;
  for (size_t j = 1; j < spec.children.size(); ++j) {
    per_type.push_back(BuildNode(spec.children[j], state));
  }
  std::vector<ParamId> priors;
  for (size_t j = 0; j <= S; ++j) {
    std::string pname = name + ".prior" + std::to_string(j);
    priors.push_back(state->params->Contains(pname)
                         ? state->params->Find(pname)
                         : state->params->Define(
                               pname, 1.0, ParameterVector::kRawWeightLo,
                               ParameterVector::kRawWeightHi,
                               ParamGroup::kPriors));
  }
  std::vector<ParamId> lambdas;
  if (blend) {
    for (size_t j = 1; j <= S; ++j) {
      std::string lname = name + ".lam" + std::to_string(j);
      lambdas.push_back(state->params->Contains(lname)
                            ? state->params->Find(lname)
                            : state->params->Define(lname, 0.5, 0.0, 1.0,
                                                    ParamGroup::kInterpolation));
    }
  }
  return std::make_unique<SentenceMixtureNode>(
      std::move(global), std::move(per_type), std::move(priors),
      std::move(lambdas), state->params);
}

std::unique_ptr<ModelNode> BuildNode(const ModelSpecNode& spec,
                                     BuildState* state) {
  if (spec.kind == "leaf") return BuildLeaf(spec, state);
  if (spec.kind == "interpolate") return BuildInterpolate(spec, state);
  if (spec.kind == "product") return BuildProduct(spec, state);
  if (spec.kind == "cache") return BuildCache(spec, state);
  if (spec.kind == "mixture") return BuildMixture(spec, state);
  throw DataError("model spec: unknown node kind '" + spec.kind + "'");
}

// Assigns every leaf a pattern store, sharing stores whose pattern,
// target and type restriction subsume the leaf's.
void AssignStores(BuildState* state, Model* model) {
  std::vector<LeafNode*> order = state->leaves;
  std::stable_sort(order.begin(), order.end(),
                   [](const LeafNode* a, const LeafNode* b) {
                     return a->pattern().slots.size() >
                            b->pattern().slots.size();
                   });
  for (LeafNode* leaf : order) {
    PatternStore* found = nullptr;
    for (auto& store : model->stores) {
      if (store->target == leaf->target_kind() &&
          store->type_restriction == leaf->type_restriction() &&
          IsSuffixOf(leaf->pattern().slots, store->pattern.slots)) {
        found = store.get();
        break;
      }
    }
    if (!found) {
      auto store = std::make_unique<PatternStore>();
      store->pattern = leaf->pattern();
      store->target = leaf->target_kind();
      store->type_restriction = leaf->type_restriction();
      found = store.get();
      model->stores.push_back(std::move(store));
    }
    if (leaf->smoother_params().family == SmoothingFamily::kKneserNey) {
      found->needs_continuations = true;
    }
    if (leaf->smoother_params().family == SmoothingFamily::kKatz) {
      found->needs_katz = true;
    }
    leaf->BindStore(found, &model->params);
  }
}

// One counting pass per store over the training corpus.
void CountStorePass(PatternStore* store, const Corpus& training,
                    const ModelResources& resources,
                    const TrainOptions& options) {
  const ContextPattern& pattern = store->pattern;
  const ClusterMap* cond = resources.conditional.get();
  const ClusterMap* pred = resources.predictive.get();
  const SentenceTypeAssignment* types = resources.sentence_types.get();
  if (store->type_restriction >= 0 && types == nullptr) {
    throw DataError("counting: sentence types required but missing");
  }
  NeededCountsFilter pass_through;
  const NeededCountsFilter& filter =
      options.exhaustive ? (pass_through = NeededCountsFilter::PassThrough())
                         : store->filter;

  uint32_t pad = std::max<uint32_t>(1, pattern.max_distance());
  size_t bottom = pattern.bottom_level();
  std::unordered_set<TokenSeq, TokenSeqHash, TokenSeqEq> seen_extensions;
  std::vector<CountOfCountsSampler> samplers;
  if (store->needs_katz) {
    for (size_t len = 0; len <= pattern.slots.size(); ++len) {
      samplers.emplace_back(options.count_of_counts_target, 7);
    }
  }
  TokenSeq values(pattern.slots.size());
  TokenSeq key;
  for (size_t si = 0; si < training.sentences.size(); ++si) {
    if (store->type_restriction >= 0 &&
        types->types.at(si) != static_cast<uint32_t>(store->type_restriction)) {
      continue;
    }
    const Sentence& sent = training.sentences[si];
    TokenSeq padded = PadSentence(sent, pad + 1);
    for (uint32_t i = pad; i < padded.size(); ++i) {
      TokenId word = padded[i];
      TokenId event = store->target == TargetKind::kCluster
                          ? pred->ClusterOf(word)
                          : word;
      for (size_t k = 0; k < pattern.slots.size(); ++k) {
        const PatternSlot& slot = pattern.slots[k];
        if (slot.distance == 0) {
          values[k] = pred->ClusterOf(word);
        } else if (slot.cluster) {
          values[k] = cond->ClusterOf(padded[i - slot.distance]);
        } else {
          values[k] = padded[i - slot.distance];
        }
      }
      for (size_t level = 0; level <= bottom; ++level) {
        TokenSpan context(values.data() + level,
                          pattern.slots.size() - level);
        store->store.AddFilteredEvent(filter, context, event);
        if (store->needs_katz) {
          key.assign(context.begin(), context.end());
          key.push_back(event);
          samplers[context.size()].Observe(key);
        }
      }
      // Continuation tracking: level l >= 1 contexts gain a continuation
      // when the one-slot-longer sequence is new.
      for (size_t level = 1; level <= bottom; ++level) {
        TokenSpan suffix(values.data() + level, pattern.slots.size() - level);
        if (!filter.WantsContinuations(suffix)) continue;
        key.assign(values.begin() + (level - 1), values.end());
        key.push_back(event);
        if (seen_extensions.insert(key).second) {
          store->store.AddContinuation(suffix, event);
        }
      }
    }
  }
  store->store.Finalize();
  if (store->needs_katz) {
    store->katz_tables.clear();
    for (size_t len = 0; len <= pattern.slots.size(); ++len) {
      store->katz_tables.push_back(
          samplers[len].Extract(static_cast<uint32_t>(len + 1)));
    }
  }
}

}  // namespace

MixtureScratch Model::MakeMixtureScratch() const { return MixtureScratch{}; }

Model BuildModel(const ModelSpecNode& spec, const ModelResources& resources,
                 const Corpus& training, const Corpus* heldout,
                 const Corpus* test, const TrainOptions& options) {
  if (resources.vocab == nullptr) throw DataError("build: vocabulary missing");
  Model model;
  model.resources = resources;
  model.spec = spec;
  BuildState state;
  state.resources = &model.resources;
  state.params = &model.params;
  model.root = BuildNode(spec, &state);
  model.max_distance = std::max<uint32_t>(1, model.root->MaxDistance());
  model.uses_mixture = state.has_mixture;
  model.uses_cache = !state.caches.empty();
  AssignStores(&state, &model);
  for (LeafNode* leaf : state.leaves) {
    leaf->set_katz_cutoff(options.katz_cutoff);
  }

  // Needed-counts scan over heldout and test.
  if (!options.exhaustive) {
    MixtureScratch scratch;
    for (const Corpus* stream : {heldout, test}) {
      if (!stream) continue;
      for (const Sentence& sent : stream->sentences) {
        TokenSeq padded = PadSentence(sent, model.max_distance + 1);
        EvalContext ctx;
        ctx.padded = &padded;
        ctx.mixture = &scratch;
        for (uint32_t i = model.max_distance; i < padded.size(); ++i) {
          ctx.position = i;
          model.root->CollectNeeded(ctx, padded[i]);
        }
      }
    }
  }

  for (auto& store : model.stores) {
    CountStorePass(store.get(), training, model.resources, options);
  }
  for (LeafNode* leaf : state.leaves) leaf->FinishTraining();
  for (LeafNode* leaf : state.leaves) {
    model.component_roots.emplace(leaf->param_prefix(), leaf);
  }
  return model;
}

}  // namespace lmkit
