// tests/clustering_test.cc

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

#include "lmkit/clustering.h"
#include "lmkit/vocab.h"

using namespace lmkit;

namespace {

std::vector<ItemCounts> RandomItems(size_t n, size_t targets, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ItemCounts> items(n);
  for (ItemCounts& it : items) {
    size_t k = 1 + rng() % 6;
    std::map<TokenId, uint64_t> m;
    for (size_t j = 0; j < k; ++j) {
      m[static_cast<TokenId>(rng() % targets)] += 1 + rng() % 5;
    }
    it.targets.assign(m.begin(), m.end());
    for (auto& [_, c] : it.targets) it.total += c;
  }
  return items;
}

Corpus CorpusFromLines(const std::string& text, Vocabulary* vocab) {
  {
    std::istringstream in(text);
    *vocab = BuildVocabulary(in, VocabularyConfig{});
  }
  std::istringstream in(text);
  return ReadCorpus(in, *vocab);
}

}  // namespace

TEST_CASE("move delta equals full recomputation over randomized moves") {
  std::vector<ItemCounts> items = RandomItems(60, 25, 123);
  std::mt19937_64 rng(7);
  std::vector<uint32_t> assignment(items.size());
  for (auto& a : assignment) a = rng() % 4;
  ClusterObjectiveState state(&items, assignment, 4);
  CHECK(state.objective() ==
        doctest::Approx(state.RecomputeObjective()).epsilon(1e-9));
  int applied = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    uint32_t item = rng() % items.size();
    uint32_t to = rng() % 4;
    double before = state.RecomputeObjective();
    double delta = state.MoveDelta(item, to);
    if (state.cluster_of(item) == to) {
      CHECK(delta == 0.0);
      continue;
    }
    state.ApplyMove(item, to);
    double after = state.RecomputeObjective();
    CHECK(std::abs((after - before) - delta) <= 1e-9);
    CHECK(std::abs(state.objective() - after) <= 1e-9);
    ++applied;
  }
  CHECK(applied >= 1000);
}

TEST_CASE("moving the only member out empties a cluster consistently") {
  std::vector<ItemCounts> items = RandomItems(5, 6, 9);
  std::vector<uint32_t> assignment{0, 1, 1, 1, 1};
  ClusterObjectiveState state(&items, assignment, 2);
  double before = state.RecomputeObjective();
  double delta = state.MoveDelta(0, 1);
  state.ApplyMove(0, 1);
  CHECK(state.cluster_size(0) == 0);
  CHECK(state.objective() ==
        doctest::Approx(state.RecomputeObjective()).epsilon(1e-9));
  CHECK(state.objective() == doctest::Approx(before + delta).epsilon(1e-9));
}

TEST_CASE("planted two-cluster instance beats all other partitions") {
  // Items a,b precede only x; c,d precede only y (the four words are the
  // only clustered items, so all 7 proper 2-way partitions enumerate).
  PairCounts pairs;
  pairs.item_ids = {0, 1, 2, 3};  // a b c d
  for (int i = 0; i < 4; ++i) {
    ItemCounts it;
    TokenId succ = i < 2 ? 100 : 200;  // x / y
    it.targets = {{succ, 2}};
    it.total = 2;
    pairs.items.push_back(it);
  }
  ClusteringOptions opt;
  opt.seed = 3;
  opt.add_pseudo_counts = false;
  ClusterMap map = ClusterWords(pairs, 4, 2, ClusterKind::kConditional, opt);
  CHECK(map.ClusterOf(0) == map.ClusterOf(1));
  CHECK(map.ClusterOf(2) == map.ClusterOf(3));
  CHECK(map.ClusterOf(0) != map.ClusterOf(2));

  // Brute force over all 7 proper 2-way partitions: the assignment found
  // must attain the minimum objective.
  std::vector<uint32_t> found(4);
  for (TokenId id = 0; id < 4; ++id) found[id] = map.ClusterOf(id);
  double found_obj =
      ClusterObjectiveState(&pairs.items, found, 2).RecomputeObjective();
  double best = 1e300;
  int partitions = 0;
  for (uint32_t mask = 1; mask + 1 < (1u << 4); ++mask) {
    if (mask & 1) continue;  // fix item 0 on side 0 to dedupe mirrors
    std::vector<uint32_t> assign(4);
    for (size_t i = 0; i < 4; ++i) assign[i] = (mask >> i) & 1;
    double obj =
        ClusterObjectiveState(&pairs.items, assign, 2).RecomputeObjective();
    best = std::min(best, obj);
    ++partitions;
  }
  CHECK(partitions == 7);
  CHECK(found_obj == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("identical successor rows land in the same cluster") {
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines("a x\nb x\nc y\nc y\nc z\n", &vocab);
  PairCounts pairs = BuildPairCounts(corpus, vocab, false, false);
  ClusteringOptions opt;
  ClusterMap map =
      ClusterWords(pairs, vocab.size(), 2, ClusterKind::kConditional, opt);
  CHECK(map.ClusterOf(vocab.Lookup("a")) == map.ClusterOf(vocab.Lookup("b")));
}

TEST_CASE("predictive equals conditional on the reversed stream") {
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines(
      "a x b\nx c y a\nb b y\nc a x y\nx y a b c\n", &vocab);
  PairCounts pred = BuildPairCounts(corpus, vocab, true, true);
  // Manually reversed pairs must produce the identical item table.
  std::unordered_map<TokenId, std::map<TokenId, uint64_t>> manual;
  for (const Sentence& sent : corpus.sentences) {
    TokenSeq padded = PadSentence(sent, 2);
    for (size_t i = 1; i < padded.size(); ++i) {
      ++manual[padded[i]][padded[i - 1]];
    }
  }
  for (TokenId id = 0; id < vocab.size(); ++id) ++manual[id][0xfffffffeu];
  CHECK(pred.item_ids.size() == manual.size());
  for (size_t i = 0; i < pred.item_ids.size(); ++i) {
    const auto& row = manual.at(pred.item_ids[i]);
    CHECK(pred.items[i].targets.size() == row.size());
    for (const auto& [v, c] : pred.items[i].targets) {
      CHECK(row.at(v) == c);
    }
  }
}

TEST_CASE("buckshot: two items split one per side under any seed") {
  std::vector<ItemCounts> items = RandomItems(2, 8, 77);
  for (uint64_t seed = 1; seed < 12; ++seed) {
    std::vector<uint32_t> sides = SplitClusterBuckshot(items, {0, 1}, seed);
    CHECK(sides[0] + sides[1] == 1);
  }
  CHECK_THROWS_AS(SplitClusterBuckshot(items, {0}, 1), DataError);
}

TEST_CASE("buckshot: planted partition recovered; split refines objective") {
  // Items 0..9 hit targets 0..4 only; items 10..19 hit targets 5..9 only.
  std::mt19937_64 rng(5);
  std::vector<ItemCounts> items(20);
  for (size_t i = 0; i < 20; ++i) {
    std::map<TokenId, uint64_t> m;
    for (int j = 0; j < 4; ++j) {
      m[static_cast<TokenId>((i < 10 ? 0 : 5) + rng() % 5)] += 1 + rng() % 3;
    }
    items[i].targets.assign(m.begin(), m.end());
    for (auto& [_, c] : items[i].targets) items[i].total += c;
  }
  std::vector<uint32_t> all(20);
  for (uint32_t i = 0; i < 20; ++i) all[i] = i;
  double before = ClusterObjectiveState(
                      &items, std::vector<uint32_t>(20, 0), 1)
                      .RecomputeObjective();
  std::vector<uint32_t> sides = SplitClusterBuckshot(items, all, 11);
  for (size_t i = 1; i < 10; ++i) CHECK(sides[i] == sides[0]);
  for (size_t i = 11; i < 20; ++i) CHECK(sides[i] == sides[10]);
  CHECK(sides[0] != sides[10]);
  double after =
      ClusterObjectiveState(&items, sides, 2).RecomputeObjective();
  CHECK(after <= before + 1e-9);
}

TEST_CASE("final swap passes: monotone and locally optimal") {
  std::vector<ItemCounts> items = RandomItems(40, 15, 321);
  std::mt19937_64 rng(9);
  std::vector<uint32_t> assignment(items.size());
  for (auto& a : assignment) a = rng() % 4;
  ClusterObjectiveState state(&items, assignment, 4);
  double prev = state.objective();
  for (int pass = 0; pass < 8; ++pass) {
    size_t moves = state.SwapPass();
    CHECK(state.objective() <= prev + 1e-9);
    prev = state.objective();
    if (moves == 0) break;
  }
  // Local optimum: no single move improves (unless it would empty a
  // cluster, which the pass refuses).
  for (uint32_t item = 0; item < items.size(); ++item) {
    if (state.cluster_size(state.cluster_of(item)) <= 1) continue;
    for (uint32_t c = 0; c < 4; ++c) {
      CHECK(state.MoveDelta(item, c) >= -1e-9);
    }
  }
  // Re-running on an already-optimal assignment makes zero moves.
  ClusterObjectiveState again(&items, state.assignment(), 4);
  CHECK(again.SwapPass() == 0);
}

TEST_CASE("cluster words: determinism and validation") {
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines(
      "a x b y\nx c y a\nb b y c\nc a x y\nx y a b c\na b\nc x\n", &vocab);
  PairCounts pairs = BuildPairCounts(corpus, vocab, false, true);
  ClusteringOptions opt;
  opt.seed = 42;
  ClusterMap m1 =
      ClusterWords(pairs, vocab.size(), 4, ClusterKind::kConditional, opt);
  ClusterMap m2 =
      ClusterWords(pairs, vocab.size(), 4, ClusterKind::kConditional, opt);
  for (TokenId id = 0; id < vocab.size(); ++id) {
    CHECK(m1.ClusterOf(id) == m2.ClusterOf(id));
  }
  // Hardness: all clusters non-empty, every word mapped exactly once.
  size_t total = 0;
  for (uint32_t c = 0; c < m1.num_clusters(); ++c) {
    CHECK(!m1.Members(c).empty());
    total += m1.Members(c).size();
  }
  CHECK(total == vocab.size());
  CHECK_THROWS_AS(
      ClusterWords(pairs, vocab.size(), 3, ClusterKind::kConditional, opt),
      DataError);
  CHECK_THROWS_AS(ClusterWords(pairs, vocab.size(), 1024,
                               ClusterKind::kConditional, opt),
                  DataError);
}

TEST_CASE("cluster map io round trip") {
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines("a b c a\nb c a b\n", &vocab);
  PairCounts pairs = BuildPairCounts(corpus, vocab, false, true);
  ClusteringOptions opt;
  ClusterMap map =
      ClusterWords(pairs, vocab.size(), 2, ClusterKind::kConditional, opt);
  std::ostringstream out;
  map.Write(out, vocab);
  std::istringstream in(out.str());
  ClusterMap loaded = ClusterMap::Read(in, vocab, ClusterKind::kConditional);
  for (TokenId id = 0; id < vocab.size(); ++id) {
    CHECK(loaded.ClusterOf(id) == map.ClusterOf(id));
  }
}

TEST_CASE("sentence clustering: S=1 objective is corpus unigram entropy") {
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines("a b a\nb c\nc c a\nb a\n", &vocab);
  ClusteringOptions opt;
  SentenceTypeAssignment st = ClusterSentences(corpus, 1, opt);
  CHECK(st.num_types == 1);
  for (uint32_t t : st.types) CHECK(t == 0);
  PairCounts bags = BuildSentenceBags(corpus);
  double obj = ClusterObjectiveState(&bags.items, st.types, 1)
                   .RecomputeObjective();
  // Corpus unigram log likelihood: -sum_w C(w) ln(C(w)/N).
  std::map<TokenId, double> counts;
  double n = 0;
  for (const Sentence& s : corpus.sentences) {
    for (TokenId t : s.tokens) {
      counts[t] += 1;
      n += 1;
    }
  }
  double expect = 0;
  for (auto& [_, c] : counts) expect -= c * std::log(c / n);
  CHECK(obj == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("sentence clustering: planted types recovered; local optimum") {
  // Numeric-like vs alphabetic-like sentences.
  std::string text;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 30; ++i) {
    bool numeric = i % 2 == 0;
    for (int w = 0; w < 6; ++w) {
      text += (numeric ? "n" : "a") + std::to_string(rng() % 8);
      text += w == 5 ? "\n" : " ";
    }
  }
  Vocabulary vocab;
  Corpus corpus = CorpusFromLines(text, &vocab);
  ClusteringOptions opt;
  opt.seed = 19;
  SentenceTypeAssignment st = ClusterSentences(corpus, 2, opt);
  for (size_t i = 0; i < st.types.size(); ++i) {
    CHECK(st.types[i] == st.types[i % 2]);
  }
  CHECK(st.types[0] != st.types[1]);
  // No single-sentence reassignment improves the objective.
  PairCounts bags = BuildSentenceBags(corpus);
  ClusterObjectiveState state(&bags.items, st.types, 2);
  for (uint32_t i = 0; i < bags.items.size(); ++i) {
    for (uint32_t c = 0; c < 2; ++c) {
      CHECK(state.MoveDelta(i, c) >= -1e-9);
    }
  }
  CHECK_THROWS_AS(ClusterSentences(corpus, 64, opt), DataError);
  std::ostringstream out;
  st.Write(out);
  std::istringstream in(out.str());
  SentenceTypeAssignment loaded = SentenceTypeAssignment::Read(in);
  CHECK(loaded.types == st.types);
}
