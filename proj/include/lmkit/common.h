// lmkit/common.h

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

#ifndef LMKIT_COMMON_H_
#define LMKIT_COMMON_H_

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmkit {

using TokenId = uint32_t;
using TokenSeq = std::vector<TokenId>;
using TokenSpan = std::span<const TokenId>;

// All data errors (bad input files, violated preconditions) throw this;
// numerical failures (zero probabilities, broken normalization) throw
// NumericalError.  The CLI maps them to exit codes 2 and 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// FNV-1a over the little-endian bytes of each token id, seed fixed at the
// FNV offset basis.  This is the documented hash used for count-of-count
// sampling; changing it changes which n-grams are sampled.
inline uint64_t HashTokenSeq(TokenSpan seq) {
  uint64_t h = 1469598103934665603ULL;
  for (TokenId id : seq) {
    for (int b = 0; b < 4; ++b) {
      h ^= (id >> (8 * b)) & 0xffu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct TokenSeqHash {
  using is_transparent = void;
  size_t operator()(const TokenSeq& s) const {
    return static_cast<size_t>(HashTokenSeq(s));
  }
  size_t operator()(TokenSpan s) const {
    return static_cast<size_t>(HashTokenSeq(s));
  }
};

struct TokenSeqEq {
  using is_transparent = void;
  template <typename A, typename B>
  bool operator()(const A& a, const B& b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Compensated (Kahan) summation so evaluation totals do not depend on
// magnitude ordering beyond float rounding.
class KahanSum {
 public:
  void Add(double x) {
    double y = x - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double Value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::string JoinTokens(const std::vector<std::string>& toks, char sep = ' ');

}  // namespace lmkit

#endif  // LMKIT_COMMON_H_
