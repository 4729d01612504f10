// lmkit/textgen.h

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

#ifndef LMKIT_TEXTGEN_H_
#define LMKIT_TEXTGEN_H_

#include <cstdint>
#include <iosfwd>
#include <string>

namespace lmkit {

// Deterministic document-structured text synthesizer that stands in for a
// real corpus: Zipfian topic vocabularies per sentence type, per-article
// bursty entity mentions and collocations (so caches and mixtures have
// signal), article markers roughly every fifty sentences.
struct SynthConfig {
  uint64_t seed = 12345;
  uint64_t target_words = 1'000'000;
  uint32_t num_types = 4;          // latent sentence types
  uint32_t topic_words_per_type = 1500;
  uint32_t function_words = 120;
  uint32_t entity_pool = 2000;
  uint32_t entities_per_article = 8;
  uint32_t sentences_per_article = 50;  // mean; varies +-20%
  uint32_t mean_sentence_length = 18;
  uint32_t phrases_per_type = 200;      // fixed trigram collocations
};

void SynthesizeCorpus(const SynthConfig& config, std::ostream& out);
std::string SynthesizeCorpusToString(const SynthConfig& config);

}  // namespace lmkit

#endif  // LMKIT_TEXTGEN_H_
