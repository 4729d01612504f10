// lmkit/textgen.cc

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

#include "lmkit/textgen.h"

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace lmkit {

namespace {

const char* const kFunctionInventory[] = {
    "the",   "of",    "and",   "to",    "in",   "that",  "is",    "was",
    "he",    "for",   "it",    "with",  "as",   "his",   "on",    "be",
    "at",    "by",    "had",   "not",   "are",  "but",   "from",  "or",
    "have",  "an",    "they",  "which", "one",  "you",   "were",  "her",
    "all",   "she",   "there", "would", "their", "we",   "him",   "been",
    "has",   "when",  "who",   "will",  "more", "if",    "no",    "out",
    "so",    "said",  "what",  "up",    "its",  "about", "into",  "than",
    "them",  "can",   "only",  "other", "new",  "some",  "could", "time",
    "these", "two",   "may",   "then",  "do",   "first", "any",   "my",
    "now",   "such",  "like",  "our",   "over", "man",   "me",    "even",
    "most",  "made",  "after", "also",  "did",  "many",  "before", "must",
    "through", "back", "years", "where", "much", "your",  "way",   "well",
    "down",  "should", "because", "each", "just", "those", "people", "how",
    "too",   "little", "state", "good",  "very", "make",  "world", "still",
    "own",   "see",   "men",   "work",  "long", "get",   "here",  "between",
};

// Deterministic pseudo-word from an index: syllable pairs/triples.
std::string PseudoWord(uint64_t index, const char* salt) {
  static const char* const onsets[] = {"b",  "d",  "f",  "g",  "k", "l",
                                       "m",  "n",  "p",  "r",  "s", "t",
                                       "v",  "z",  "br", "dr", "st", "tr"};
  static const char* const nuclei[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  static const char* const codas[] = {"", "n", "r", "s", "l", "t"};
  uint64_t h = index * 0x9E3779B97F4A7C15ULL + salt[0] * 131;
  std::string w;
  int syllables = 2 + static_cast<int>(h % 2);
  for (int s = 0; s < syllables; ++s) {
    w += onsets[(h >> (7 * s)) % 18];
    w += nuclei[(h >> (7 * s + 3)) % 7];
    if (s + 1 == syllables) w += codas[(h >> (7 * s + 5)) % 6];
  }
  w += salt;
  w += std::to_string(index);
  return w;
}

// Zipf sampler over n items: weight 1/(rank+2).
class ZipfPicker {
 public:
  explicit ZipfPicker(size_t n) {
    cdf_.reserve(n);
    double c = 0;
    for (size_t i = 0; i < n; ++i) {
      c += 1.0 / static_cast<double>(i + 2);
      cdf_.push_back(c);
    }
  }
  size_t Pick(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, cdf_.back());
    double x = u(rng);
    size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (cdf_[mid] < x) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

void SynthesizeCorpus(const SynthConfig& config, std::ostream& out) {
  std::mt19937_64 rng(config.seed);
  size_t n_function =
      std::min<size_t>(config.function_words,
                       sizeof(kFunctionInventory) / sizeof(char*));
  std::vector<std::vector<std::string>> topics(config.num_types);
  for (uint32_t t = 0; t < config.num_types; ++t) {
    topics[t].reserve(config.topic_words_per_type);
    for (uint32_t j = 0; j < config.topic_words_per_type; ++j) {
      topics[t].push_back(
          PseudoWord(t * config.topic_words_per_type + j, "t"));
    }
  }
  std::vector<std::string> entities;
  entities.reserve(config.entity_pool);
  for (uint32_t j = 0; j < config.entity_pool; ++j) {
    entities.push_back(PseudoWord(j, "e"));
  }
  // Fixed collocations: per type, trigram phrases of two topic words glued
  // by a function word; their repetition is what higher-order n-grams and
  // trigram caches pick up.
  struct Phrase {
    std::string a, b, c;
  };
  std::vector<std::vector<Phrase>> phrases(config.num_types);
  ZipfPicker topic_zipf(config.topic_words_per_type);
  ZipfPicker function_zipf(n_function);
  for (uint32_t t = 0; t < config.num_types; ++t) {
    for (uint32_t p = 0; p < config.phrases_per_type; ++p) {
      Phrase ph;
      ph.a = topics[t][topic_zipf.Pick(rng)];
      ph.b = kFunctionInventory[function_zipf.Pick(rng)];
      ph.c = topics[t][topic_zipf.Pick(rng)];
      phrases[t].push_back(ph);
    }
  }
  ZipfPicker phrase_zipf(config.phrases_per_type);
  ZipfPicker entity_zipf(config.entities_per_article);

  uint64_t words_emitted = 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool first_article = true;
  while (words_emitted < config.target_words) {
    if (!first_article) out << "<art>\n";
    first_article = false;
    // Articles are mostly one type with occasional off-type sentences.
    uint32_t article_type = static_cast<uint32_t>(rng() % config.num_types);
    std::vector<const std::string*> article_entities;
    for (uint32_t j = 0; j < config.entities_per_article; ++j) {
      article_entities.push_back(&entities[rng() % config.entity_pool]);
    }
    double spread = 0.4;
    uint32_t n_sent = static_cast<uint32_t>(
        config.sentences_per_article * (1.0 - spread / 2 + spread * unif(rng)));
    n_sent = std::max(5u, n_sent);
    for (uint32_t s = 0; s < n_sent && words_emitted < config.target_words;
         ++s) {
      uint32_t type = unif(rng) < 0.9
                          ? article_type
                          : static_cast<uint32_t>(rng() % config.num_types);
      uint32_t len = std::max<uint32_t>(
          4, static_cast<uint32_t>(config.mean_sentence_length *
                                   (0.5 + unif(rng))));
      std::vector<std::string> toks;
      while (toks.size() < len) {
        double r = unif(rng);
        if (r < 0.16) {
          const Phrase& ph = phrases[type][phrase_zipf.Pick(rng)];
          toks.push_back(ph.a);
          toks.push_back(ph.b);
          toks.push_back(ph.c);
        } else if (r < 0.30) {
          // Entity mention; often a two-entity collocation, which is what
          // distinguishes the trigram cache from the unigram cache.
          size_t e = entity_zipf.Pick(rng);
          toks.push_back(*article_entities[e]);
          if (unif(rng) < 0.5) {
            toks.push_back(kFunctionInventory[function_zipf.Pick(rng)]);
            toks.push_back(
                *article_entities[(e + 1) % article_entities.size()]);
          }
        } else if (r < 0.62) {
          toks.push_back(topics[type][topic_zipf.Pick(rng)]);
        } else {
          toks.push_back(kFunctionInventory[function_zipf.Pick(rng)]);
        }
      }
      for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out << ' ';
        out << toks[i];
      }
      out << '\n';
      words_emitted += toks.size() + 1;
      if (s % 9 == 8) {
        out << "<p>\n";
        words_emitted += 1;
      }
    }
  }
}

std::string SynthesizeCorpusToString(const SynthConfig& config) {
  std::ostringstream ss;
  SynthesizeCorpus(config, ss);
  return ss.str();
}

}  // namespace lmkit
