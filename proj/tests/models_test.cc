// tests/models_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "lmkit/eval.h"
#include "lmkit/model.h"
#include "lmkit/presets.h"
#include "lmkit/textgen.h"

using namespace lmkit;

namespace {

struct World {
  Vocabulary vocab;
  Corpus training;
  Corpus heldout;
  Corpus test;
  ModelResources resources;
};

World MakeWorld(const std::string& text, uint32_t period = 10,
                bool identity_clusters = true, uint32_t clusters = 8,
                bool sentence_types = false, uint32_t S = 2) {
  World w;
  {
    std::istringstream in(text);
    w.vocab = BuildVocabulary(in, VocabularyConfig{});
  }
  std::istringstream in(text);
  Corpus all = ReadCorpus(in, w.vocab);
  CorpusPartition part = PartitionCorpus(all, period);
  w.training = std::move(part.training);
  w.heldout = std::move(part.heldout);
  w.test = std::move(part.test);
  w.resources.vocab = &w.vocab;
  if (identity_clusters) {
    w.resources.conditional = std::make_shared<ClusterMap>(
        ClusterMap::Identity(w.vocab.size(), ClusterKind::kConditional));
    w.resources.predictive = std::make_shared<ClusterMap>(
        ClusterMap::Identity(w.vocab.size(), ClusterKind::kPredictive));
  } else {
    ClusteringOptions opt;
    opt.seed = 5;
    PairCounts cond_pairs = BuildPairCounts(w.training, w.vocab, false, true);
    PairCounts pred_pairs = BuildPairCounts(w.training, w.vocab, true, true);
    w.resources.conditional = std::make_shared<ClusterMap>(ClusterWords(
        cond_pairs, w.vocab.size(), clusters, ClusterKind::kConditional, opt));
    w.resources.predictive = std::make_shared<ClusterMap>(ClusterWords(
        pred_pairs, w.vocab.size(), clusters, ClusterKind::kPredictive, opt));
  }
  if (sentence_types) {
    ClusteringOptions opt;
    opt.seed = 17;
    w.resources.sentence_types = std::make_shared<SentenceTypeAssignment>(
        ClusterSentences(w.training, S, opt));
  }
  return w;
}

// Probability of `word` following `history` (a fresh single sentence).
double ProbAfter(const Model& model, const TokenSeq& history, TokenId word) {
  Sentence sent;
  sent.tokens = history;
  sent.tokens.push_back(word);
  TokenSeq padded = PadSentence(sent, model.max_distance + 1);
  CacheState cache = model.MakeCacheState();
  MixtureScratch scratch;
  EvalContext ctx;
  ctx.padded = &padded;
  ctx.cache = model.uses_cache ? &cache : nullptr;
  ctx.mixture = &scratch;
  model.root->StartSentence(ctx);
  for (uint32_t i = model.max_distance; i + 1 < padded.size(); ++i) {
    ctx.position = i;
    model.root->Advance(ctx, padded[i]);
    if (ctx.cache) cache.Update(padded[i]);
  }
  ctx.position = static_cast<uint32_t>(padded.size() - 1);
  return model.root->Prob(ctx, word);
}

double SumAfter(const Model& model, const TokenSeq& history) {
  KahanSum sum;
  for (TokenId w = 0; w < model.resources.vocab->size(); ++w) {
    if (w == kBegin) continue;
    sum.Add(ProbAfter(model, history, w));
  }
  return sum.Value();
}

std::string ZipfText(size_t tokens, size_t vocab_size, uint64_t seed,
                     size_t sent_len = 10) {
  std::mt19937_64 rng(seed);
  std::vector<double> cdf;
  double c = 0;
  for (size_t k = 0; k < vocab_size; ++k) {
    c += 1.0 / (k + 2.0);
    cdf.push_back(c);
  }
  std::uniform_real_distribution<double> unif(0.0, cdf.back());
  std::string out;
  for (size_t i = 0; i < tokens; ++i) {
    size_t k = std::lower_bound(cdf.begin(), cdf.end(), unif(rng)) -
               cdf.begin();
    out += "w" + std::to_string(k);
    out += (i + 1 == tokens || i % sent_len == sent_len - 1) ? "\n" : " ";
  }
  return out;
}

}  // namespace

TEST_CASE("pattern parsing round trip and semantics") {
  ContextPattern p = ContextPattern::Parse("v w _ y");
  CHECK(p.slots.size() == 3);
  CHECK(p.slots[0].distance == 4);
  CHECK(p.slots[1].distance == 3);
  CHECK(p.slots[2].distance == 1);
  CHECK(p.ToString() == "v w y");
  ContextPattern ix = ContextPattern::Parse("x X y Y");
  CHECK(ix.slots[1].cluster);
  CHECK(ix.num_levels() == 5);
  ContextPattern dz = ContextPattern::Parse("x y Z");
  CHECK(dz.has_target_cluster_slot());
  CHECK(dz.num_levels() == 3);  // [x y Z] [y Z] [Z]
  CHECK_THROWS_AS(ContextPattern::Parse("Z x"), DataError);
  CHECK_THROWS_AS(ContextPattern::Parse("z"), DataError);
}

TEST_CASE("leaf with pattern y equals a direct bigram smoother") {
  World w = MakeWorld(ZipfText(3000, 25, 1));
  TrainOptions topt;
  topt.exhaustive = true;
  Model model = BuildModel(NgramSpec(2, "kn"), w.resources, w.training,
                           &w.heldout, &w.test, topt);
  // An independently built word-bigram store and smoother.
  CountStore store =
      AccumulateCounts(w.training, NeededCountsFilter::PassThrough(), 2);
  ParameterVector params;
  SmootherParams sp = DefineSmootherParams(
      SmoothingFamily::kKneserNey, BackoffMode::kInterpolated,
      DiscountKind::kSingle, 2, "kn", &params);
  // Match the model's default initialization.
  Smoother direct(&store, sp, &params);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    TokenId h = static_cast<TokenId>(rng() % w.vocab.size());
    TokenId t = static_cast<TokenId>(rng() % w.vocab.size());
    if (h == kBegin || t == kBegin) continue;
    TokenSeq ctx{h};
    Ladder ladder;
    ladder.space_size = w.vocab.event_size();
    ladder.contexts.push_back(TokenSpan(ctx.data(), 1));
    ladder.contexts.push_back(TokenSpan(ctx.data(), 0));
    CHECK(ProbAfter(model, {h}, t) ==
          doctest::Approx(direct.Prob(ladder, t)).epsilon(1e-12));
  }
}

TEST_CASE("index pattern: hard clusters make mixed keys redundant") {
  // C(party EVENT on PREPOSITION) == C(party on) under hard clustering.
  std::string text;
  for (int i = 0; i < 6; ++i) text += "party on tuesday\n";
  for (int i = 0; i < 4; ++i) text += "party on friday\n";
  text += "dance on monday\nparty at noon\n";
  World w = MakeWorld(text, 6, /*identity_clusters=*/false, 4);
  TrainOptions topt;
  topt.exhaustive = true;
  Model ix = BuildModel(ClusterSpec("index", 3, "kn"), w.resources,
                        w.training, &w.heldout, &w.test, topt);
  Model tri = BuildModel(NgramSpec(3, "kn"), w.resources, w.training,
                         &w.heldout, &w.test, topt);
  // Locate the index store (pattern "x X y Y") and compare its full-context
  // row total against the plain trigram context count.
  TokenId party = w.vocab.Lookup("party");
  TokenId on = w.vocab.Lookup("on");
  const ClusterMap& cond = *w.resources.conditional;
  TokenSeq ix_ctx{party, cond.ClusterOf(party), on, cond.ClusterOf(on)};
  TokenSeq tri_ctx{party, on};
  const PatternStore* ix_store = nullptr;
  for (const auto& s : ix.stores) {
    if (s->pattern.slots.size() == 4) ix_store = s.get();
  }
  REQUIRE(ix_store != nullptr);
  const PatternStore* tri_store = tri.stores.front().get();
  CHECK(ix_store->store.ContextTotal(ix_ctx) ==
        tri_store->store.ContextTotal(tri_ctx));
  CHECK(ix_store->store.ContextTotal(ix_ctx) > 0);
}

TEST_CASE("product of unsmoothed ML factors telescopes exactly") {
  // C(party on)=20, C(party on WEEKDAY)=10, C(party on tuesday)=4.
  std::string text;
  for (int i = 0; i < 4; ++i) text += "party on tuesday\n";
  for (int i = 0; i < 6; ++i) text += "party on wednesday\n";
  for (int i = 0; i < 7; ++i) text += "party on cake\n";
  for (int i = 0; i < 3; ++i) text += "party on ice\n";
  text += "cake on ice\nice on cake\n";
  Vocabulary vocab;
  {
    std::istringstream in(text);
    vocab = BuildVocabulary(in, VocabularyConfig{});
  }
  // Hand-built predictive clusters: {tuesday, wednesday} together.
  std::vector<uint32_t> assign(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id) assign[id] = id;
  uint32_t weekday = vocab.Lookup("tuesday");
  assign[vocab.Lookup("wednesday")] = weekday;
  // Dense renumber.
  {
    std::map<uint32_t, uint32_t> dense;
    for (auto& a : assign) {
      auto [it, fresh] = dense.emplace(a, static_cast<uint32_t>(dense.size()));
      a = it->second;
    }
  }
  uint32_t n_clusters = 0;
  for (uint32_t a : assign) n_clusters = std::max(n_clusters, a + 1);

  World w;
  w.vocab = vocab;
  {
    std::istringstream in(text);
    Corpus all = ReadCorpus(in, w.vocab);
    w.training = all;  // no partition: tiny, train on everything
    w.heldout = all;
    w.test = all;
  }
  w.resources.vocab = &w.vocab;
  w.resources.conditional = std::make_shared<ClusterMap>(
      ClusterMap::Identity(vocab.size(), ClusterKind::kConditional));
  w.resources.predictive = std::make_shared<ClusterMap>(
      ClusterMap(ClusterKind::kPredictive, n_clusters, assign));

  // Pure-ML factors: simple interpolation with lambda=1 at each level.
  ModelSpecNode spec = ParseModelSpec(
      "(product (leaf pattern=\"x y\" smoothing=interp predict=cluster)"
      " (leaf pattern=\"x y Z\" smoothing=interp))");
  TrainOptions topt;
  topt.exhaustive = true;
  Model model = BuildModel(spec, w.resources, w.training, nullptr, nullptr,
                           topt);
  for (ParamId id : model.params.IdsWithPrefix("interp(")) {
    model.params.Set(id, 1.0);
  }
  TokenId party = w.vocab.Lookup("party");
  TokenId on = w.vocab.Lookup("on");
  TokenId tuesday = w.vocab.Lookup("tuesday");
  double p = ProbAfter(model, {party, on}, tuesday);
  CHECK(p == doctest::Approx(0.2).epsilon(1e-15));

  // Bit-exact telescoping on every seen trigram context of the corpus.
  CountStore words =
      AccumulateCounts(w.training, NeededCountsFilter::PassThrough(), 3);
  size_t checked = 0;
  words.ForEachRow([&](const TokenSeq& ctx, const CountRow& row) {
    if (ctx.size() != 2 || ctx[0] == kBegin) return;
    for (const SuccessorEntry& e : row.successors) {
      if (e.count == 0) continue;
      double ml = static_cast<double>(e.count) / row.total;
      double prod = ProbAfter(model, ctx, e.word);
      CHECK(std::abs(prod - ml) <= 1e-15);
      ++checked;
    }
  });
  CHECK(checked >= 5);
}

TEST_CASE("identity predictive clusters degenerate products to word models") {
  World w = MakeWorld(ZipfText(4000, 20, 9));
  TrainOptions topt;
  topt.exhaustive = true;
  Model ibm = BuildModel(ClusterSpec("fullibmpredict", 3, "kn"), w.resources,
                         w.training, &w.heldout, &w.test, topt);
  Model tri = BuildModel(NgramSpec(3, "kn"), w.resources, w.training,
                         &w.heldout, &w.test, topt);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    TokenSeq h{static_cast<TokenId>(rng() % w.vocab.size()),
               static_cast<TokenId>(rng() % w.vocab.size())};
    if (h[0] == kBegin || h[1] == kBegin) continue;
    TokenId t = static_cast<TokenId>(rng() % w.vocab.size());
    if (t == kBegin) continue;
    CHECK(ProbAfter(ibm, h, t) ==
          doctest::Approx(ProbAfter(tri, h, t)).epsilon(1e-9));
  }
}

TEST_CASE("fullibmpredict with real clusters normalizes") {
  World w = MakeWorld(ZipfText(10000, 40, 21), 10, false, 8);
  TrainOptions topt;
  topt.exhaustive = true;
  Model model = BuildModel(ClusterSpec("fullibmpredict", 3, "kn"),
                           w.resources, w.training, &w.heldout, &w.test, topt);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    TokenSeq h{static_cast<TokenId>(rng() % w.vocab.size()),
               static_cast<TokenId>(rng() % w.vocab.size())};
    CHECK(SumAfter(model, h) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("interpolation: pass-through, equal children, renormalization") {
  World w = MakeWorld(ZipfText(2000, 15, 4));
  TrainOptions topt;
  topt.exhaustive = true;
  // Single child: identity regardless of weight.
  Model one = BuildModel(
      ParseModelSpec("(interpolate name=m (leaf pattern=\"x y\"))"),
      w.resources, w.training, nullptr, nullptr, topt);
  Model plain = BuildModel(NgramSpec(3, "kn"), w.resources, w.training,
                           nullptr, nullptr, topt);
  one.params.Set(one.params.Find("m.w0"), 0.37);
  TokenId a = w.vocab.Lookup("w1"), b = w.vocab.Lookup("w2");
  CHECK(ProbAfter(one, {a, b}, a) ==
        doctest::Approx(ProbAfter(plain, {a, b}, a)).epsilon(1e-12));

  // Two equal children: output equals either child.
  Model two2 = BuildModel(
      ParseModelSpec(
          "(interpolate name=m (leaf pattern=\"x y\") (leaf pattern=\"x y\"))"),
      w.resources, w.training, nullptr, nullptr, topt);
  two2.params.Set(two2.params.Find("m.w0"), 0.2);
  two2.params.Set(two2.params.Find("m.w1"), 1.7);
  CHECK(ProbAfter(two2, {a, b}, a) ==
        doctest::Approx(ProbAfter(plain, {a, b}, a)).epsilon(1e-12));
}

TEST_CASE("cache: unigram frequencies, gating, reset") {
  World w = MakeWorld(ZipfText(3000, 15, 8));
  TrainOptions topt;
  topt.exhaustive = true;
  Model model = BuildModel(CacheSpec(NgramSpec(3, "kn"), true, true),
                           w.resources, w.training, nullptr, nullptr, topt);
  TokenId x = w.vocab.Lookup("w1");
  TokenId y = w.vocab.Lookup("w2");

  // Direct cache state checks: "x y x" => P_unicache(x) = 2/3.
  CacheState cache = model.MakeCacheState();
  cache.Update(x);
  cache.Update(y);
  cache.Update(x);
  CHECK(cache.total_words() == 3);
  CHECK(cache.UniCount(x) == 2);
  CHECK(cache.Contains(y));
  cache.Clear();
  CHECK(cache.total_words() == 0);

  // Gating: with an empty cache the model equals its base (weights
  // renormalize over the active static component only).
  Model base = BuildModel(NgramSpec(3, "kn"), w.resources, w.training,
                          nullptr, nullptr, topt);
  CHECK(ProbAfter(model, {x, y}, x) ==
        doctest::Approx(ProbAfter(base, {x, y}, x)).epsilon(1e-12));

  // Normalization with live cache state mid-document.
  Sentence sent;
  for (int i = 0; i < 12; ++i) {
    sent.tokens.push_back(
        w.vocab.Lookup("w" + std::to_string(i % 7)));
  }
  sent.tokens.push_back(kEndOfSentence);
  Corpus probe;
  probe.sentences = {sent};
  probe.num_documents = 1;
  NormalizationCheck check = VerifyNormalization(model, probe, 1e-9);
  CHECK(check.ok);
  CHECK(check.max_deviation <= 1e-9);
}

TEST_CASE("cache counts equal a recount of the document prefix") {
  World w = MakeWorld(ZipfText(500, 10, 2));
  CacheState cache(nullptr);
  std::mt19937_64 rng(77);
  std::vector<TokenId> doc;
  for (int i = 0; i < 300; ++i) {
    TokenId t = static_cast<TokenId>(kNumSpecials + rng() % 8);
    cache.Update(t);
    doc.push_back(t);
  }
  // Recount from scratch.
  std::map<TokenId, uint64_t> uni;
  std::map<std::pair<TokenId, TokenId>, uint64_t> bi;
  for (size_t i = 0; i < doc.size(); ++i) {
    ++uni[doc[i]];
    if (i >= 1) ++bi[{doc[i - 1], doc[i]}];
  }
  for (auto& [t, c] : uni) CHECK(cache.UniCount(t) == c);
  for (auto& [pair, c] : bi) {
    const CacheState::Row* row = cache.BigramRow(pair.first);
    REQUIRE(row != nullptr);
    auto it = row->counts.find(pair.second);
    REQUIRE(it != row->counts.end());
    CHECK(it->second == c);
  }
}

TEST_CASE("conditional trigram cache gates on the 1-back word") {
  World w = MakeWorld(ZipfText(3000, 12, 88));
  TrainOptions topt;
  topt.exhaustive = true;
  Model with_tri = BuildModel(CacheSpec(NgramSpec(3, "kn"), true, true),
                              w.resources, w.training, nullptr, nullptr, topt);
  Model uni_only = BuildModel(CacheSpec(NgramSpec(3, "kn"), true, false),
                              w.resources, w.training, nullptr, nullptr, topt);
  // Same static weights in both models.
  for (Model* m : {&with_tri, &uni_only}) {
    m->params.Set(m->params.Find("cache.w0"), 1.0);
    m->params.Set(m->params.Find("ucache.start"), 0.5);
    m->params.Set(m->params.Find("ucache.mult"), 0.0);
  }
  with_tri.params.Set(with_tri.params.Find("tcache.start"), 0.8);

  TokenId a = w.vocab.Lookup("w0");
  TokenId b = w.vocab.Lookup("w1");
  TokenId c = w.vocab.Lookup("w2");
  // History: cache contains {a, b}; next context ends in c which is NOT in
  // the cache => trigram cache inactive; model must equal the uni-only one.
  CHECK(ProbAfter(with_tri, {a, b, c}, a) ==
        doctest::Approx(ProbAfter(uni_only, {a, b, c}, a)).epsilon(1e-12));
  // Context ending in a cached word activates the trigram cache.
  CHECK(ProbAfter(with_tri, {c, a, b}, a) !=
        doctest::Approx(ProbAfter(uni_only, {c, a, b}, a)).epsilon(1e-12));
}

TEST_CASE("sentence mixture: reductions and streaming consistency") {
  World w = MakeWorld(ZipfText(6000, 20, 13), 10, true, 8, true, 2);
  TrainOptions topt;
  topt.exhaustive = true;
  Model mix = BuildModel(MixtureSpec(NgramSpec(3, "kn"), 2, "kn", 3),
                         w.resources, w.training, &w.heldout, &w.test, topt);
  Model global = BuildModel(NgramSpec(3, "kn"), w.resources, w.training,
                            &w.heldout, &w.test, topt);

  // All lambdas 0: every type collapses to the global model.
  mix.params.Set(mix.params.Find("sen.lam1"), 0.0);
  mix.params.Set(mix.params.Find("sen.lam2"), 0.0);
  mix.params.Set(mix.params.Find("sen.prior0"), 0.3);
  mix.params.Set(mix.params.Find("sen.prior1"), 1.4);
  mix.params.Set(mix.params.Find("sen.prior2"), 0.8);
  EvalReport a = Evaluate(mix, w.test, "test");
  EvalReport b = Evaluate(global, w.test, "test");
  CHECK(a.entropy_bits == doctest::Approx(b.entropy_bits).epsilon(1e-9));

  // Live lambdas: per-word streaming probabilities multiply to the
  // mixture sentence probability computed by the defining equation.
  mix.params.Set(mix.params.Find("sen.lam1"), 0.7);
  mix.params.Set(mix.params.Find("sen.lam2"), 0.4);
  const Sentence& sent = w.test.sentences.at(1);
  // Per-word probs from each component for the oracle.
  auto word_probs = [&](const Model& m, int type) {
    std::vector<double> out;
    TokenSeq padded = PadSentence(sent, m.max_distance + 1);
    // Type-specific leaves are reachable via the mixture's children; here
    // we rebuild standalone models for the oracle instead.
    (void)type;
    (void)m;
    return out;
  };
  (void)word_probs;
  // Oracle via SentenceMixtureProb on per-type standalone models.
  ModelSpecNode t0 = NgramSpec(3, "kn");
  t0.attrs["type"] = "0";
  ModelSpecNode t1 = NgramSpec(3, "kn");
  t1.attrs["type"] = "1";
  Model m0 = BuildModel(t0, w.resources, w.training, &w.heldout, &w.test, topt);
  Model m1 = BuildModel(t1, w.resources, w.training, &w.heldout, &w.test, topt);
  std::vector<std::vector<double>> per_type(2);
  std::vector<double> glob;
  TokenSeq padded = PadSentence(sent, 3);
  for (size_t i = 2; i < padded.size(); ++i) {
    TokenSeq h(padded.begin() + (i - 2), padded.begin() + i);
    // Strip begin markers shorter histories are fine for ProbAfter.
    TokenSeq hist;
    for (TokenId t : h)
      if (t != kBegin) hist.push_back(t);
    per_type[0].push_back(ProbAfter(m0, hist, padded[i]));
    per_type[1].push_back(ProbAfter(m1, hist, padded[i]));
    glob.push_back(ProbAfter(global, hist, padded[i]));
  }
  double z = 0.3 + 1.4 + 0.8;
  double oracle = SentenceMixtureProb({0.3 / z, 1.4 / z, 0.8 / z},
                                      {0.7, 0.4}, per_type, glob);

  // Streaming product from the mixture model.
  TokenSeq mp = PadSentence(sent, mix.max_distance + 1);
  EvalContext ctx;
  MixtureScratch scratch;
  ctx.padded = &mp;
  ctx.mixture = &scratch;
  mix.root->StartSentence(ctx);
  double logp = 0;
  for (uint32_t i = mix.max_distance; i < mp.size(); ++i) {
    ctx.position = i;
    double p = mix.root->Prob(ctx, mp[i]);
    logp += std::log(p);
    mix.root->Advance(ctx, mp[i]);
  }
  CHECK(std::exp(logp) == doctest::Approx(oracle).epsilon(1e-9));

  // Mixture normalizes per word position.
  NormalizationCheck check = VerifyNormalization(mix, w.test, 1e-9, 40);
  CHECK(check.ok);
}

TEST_CASE("sentence mixture prob: validation and degenerate cases") {
  std::vector<std::vector<double>> per_type{{0.5, 0.25}};
  std::vector<double> glob{0.5, 0.125};
  CHECK_THROWS_AS(
      SentenceMixtureProb({0.5, 0.4}, {0.5}, per_type, glob), DataError);
  // S=0: product of global probabilities.
  CHECK(SentenceMixtureProb({1.0}, {}, {}, glob) ==
        doctest::Approx(0.0625).epsilon(1e-12));
  // lambda = 0 collapses to the global product for any priors.
  CHECK(SentenceMixtureProb({0.25, 0.75}, {0.0}, per_type, glob) ==
        doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("everything model reduces to a plain kn 5-gram") {
  World w = MakeWorld(ZipfText(5000, 18, 44));
  TrainOptions topt;
  topt.exhaustive = true;
  EverythingOptions opt;
  opt.order = 5;
  opt.sentence_types = 0;
  opt.skips = false;
  opt.caches = false;
  Model everything = BuildModel(EverythingSpec(opt), w.resources, w.training,
                                nullptr, nullptr, topt);
  Model plain = BuildModel(NgramSpec(5, "kn"), w.resources, w.training,
                           nullptr, nullptr, topt);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    TokenSeq h;
    for (int k = 0; k < 4; ++k) {
      h.push_back(static_cast<TokenId>(kNumSpecials + rng() % 18));
    }
    TokenId t = static_cast<TokenId>(kNumSpecials + rng() % 18);
    CHECK(ProbAfter(everything, h, t) ==
          doctest::Approx(ProbAfter(plain, h, t)).epsilon(1e-9));
  }
}

TEST_CASE("everything model has 12 components per factor, normalizes") {
  World w = MakeWorld(SynthesizeCorpusToString([] {
                        SynthConfig cfg;
                        cfg.target_words = 12000;
                        return cfg;
                      }()),
                      10, false, 8, true, 2);
  EverythingOptions opt;
  opt.order = 5;
  opt.sentence_types = 2;
  ModelSpecNode spec = EverythingSpec(opt);
  // Factor component counts: sentence-specific(2) + global(2) + skips(6) +
  // caches(2) = 12 for typed factors.
  REQUIRE(spec.kind == "mixture");
  REQUIRE(spec.children.size() == 3);
  const ModelSpecNode& typed = spec.children[1];
  REQUIRE(typed.kind == "product");
  CHECK(typed.children[0].children.size() == 12);
  CHECK(typed.children[1].children.size() == 12);
  // Global factors omit the two sentence-specific components.
  CHECK(spec.children[0].children[0].children.size() == 10);

  TrainOptions topt;
  topt.exhaustive = true;
  Model model = BuildModel(spec, w.resources, w.training, &w.heldout,
                           &w.test, topt);
  NormalizationCheck check = VerifyNormalization(model, w.test, 1e-9, 25);
  CHECK(check.ok);
  CHECK(check.positions_checked >= 20);
}

TEST_CASE("filtered counting matches exhaustive probabilities event-for-event") {
  World w = MakeWorld(ZipfText(20000, 60, 91), 10, false, 8);
  for (const char* preset : {"ngram", "fullibmpredict"}) {
    ModelSpecNode spec = ResolvePresetOrFile(preset, 3, "kn", 0);
    TrainOptions exhaustive;
    exhaustive.exhaustive = true;
    Model full = BuildModel(spec, w.resources, w.training, &w.heldout,
                            &w.test, exhaustive);
    TrainOptions filtered;
    Model thin = BuildModel(spec, w.resources, w.training, &w.heldout,
                            &w.test, filtered);
    // The filtered stores must be strictly smaller at this scale.
    CHECK(thin.stores.front()->store.num_rows() <
          full.stores.front()->store.num_rows());
    // Identical probabilities on every test event; audited row lookups
    // never consult a non-admitted context.
    for (auto& store : thin.stores) {
      store->store.AttachFilterAudit(std::shared_ptr<const NeededCountsFilter>(
          &store->filter, [](const NeededCountsFilter*) {}));
    }
    EvalReport a = Evaluate(full, w.test, "test");
    EvalReport b = Evaluate(thin, w.test, "test");
    CHECK(std::abs(a.entropy_bits - b.entropy_bits) < 1e-12);
    for (auto& store : thin.stores) {
      CHECK(store->store.audit_violations() == 0);
    }
    TokenSeq padded = PadSentence(w.test.sentences[0], 3);
    for (size_t i = 2; i < padded.size(); ++i) {
      TokenSeq h{padded[i - 2], padded[i - 1]};
      TokenSeq hist;
      for (TokenId t : h)
        if (t != kBegin) hist.push_back(t);
      CHECK(std::abs(ProbAfter(full, hist, padded[i]) -
                     ProbAfter(thin, hist, padded[i])) <= 1e-12);
    }
  }
}
