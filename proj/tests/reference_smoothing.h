// tests/reference_smoothing.h

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

// Independent reference implementation of interpolated absolute
// discounting and interpolated Kneser-Ney over a word-per-line stream,
// kept deliberately naive (hash maps keyed by joined token ids, the same
// control flow as the classic two-page script): the oracle the production
// estimators are checked against, to 1e-12 per event.

#ifndef LMKIT_TESTS_REFERENCE_SMOOTHING_H_
#define LMKIT_TESTS_REFERENCE_SMOOTHING_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "lmkit/common.h"
#include "lmkit/vocab.h"

namespace lmkit::testing {

class ReferenceTrigram {
 public:
  enum class Kind { kAbsoluteDiscount, kKneserNey };

  ReferenceTrigram(Kind kind, double discount)
      : kind_(kind), discount_(discount) {}

  // Trains on the whole stream as one running sequence, two begin markers
  // in front (the production side pads sentences the same way).
  void Train(const std::vector<TokenId>& stream) {
    std::string w2 = Key(kBegin), w1 = Key(kBegin);
    for (TokenId t : stream) {
      std::string w0 = Key(t);
      if (kind_ == Kind::kAbsoluteDiscount) {
        td_[w2 + w1]++;
        if (tn_[w2 + w1 + w0]++ == 0) {
          tz_[w2 + w1]++;
        }
        bd_[w1]++;
        if (bn_[w1 + w0]++ == 0) {
          bz_[w1]++;
        }
        ud_++;
        un_[w0]++;
      } else {
        td_[w2 + w1]++;
        if (tn_[w2 + w1 + w0]++ == 0) {
          tz_[w2 + w1]++;
          bd_[w1]++;
          if (bn_[w1 + w0]++ == 0) {
            bz_[w1]++;
            ud_++;
            un_[w0]++;
          }
        }
      }
      w2 = w1;
      w1 = w0;
    }
  }

  // Probability of word w0 after (w2, w1); identical code for both kinds.
  double Prob(TokenId t2, TokenId t1, TokenId t0) const {
    std::string w2 = Key(t2), w1 = Key(t1), w0 = Key(t0);
    double unigram = Get(un_, w0) / static_cast<double>(ud_);
    double probability;
    auto bd = bd_.find(w1);
    if (bd != bd_.end()) {
      double bigram = 0;
      auto bn = bn_.find(w1 + w0);
      if (bn != bn_.end()) {
        bigram = (bn->second - discount_) / static_cast<double>(bd->second);
      }
      bigram += Get(bz_, w1) * discount_ / static_cast<double>(bd->second) *
                unigram;
      auto td = td_.find(w2 + w1);
      if (td != td_.end()) {
        double trigram = 0;
        auto tn = tn_.find(w2 + w1 + w0);
        if (tn != tn_.end()) {
          trigram = (tn->second - discount_) / static_cast<double>(td->second);
        }
        trigram += Get(tz_, w2 + w1) * discount_ /
                   static_cast<double>(td->second) * bigram;
        probability = trigram;
      } else {
        probability = bigram;
      }
    } else {
      probability = unigram;
    }
    return probability;
  }

 private:
  static std::string Key(TokenId t) { return std::to_string(t) + "#"; }
  static double Get(const std::unordered_map<std::string, long long>& m,
                    const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : static_cast<double>(it->second);
  }

  Kind kind_;
  double discount_;
  std::unordered_map<std::string, long long> td_, tn_, tz_;
  std::unordered_map<std::string, long long> bd_, bn_, bz_;
  std::unordered_map<std::string, long long> un_;
  long long ud_ = 0;
};

}  // namespace lmkit::testing

#endif  // LMKIT_TESTS_REFERENCE_SMOOTHING_H_
