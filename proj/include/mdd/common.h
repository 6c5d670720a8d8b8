// include/mdd/common.h

// Copyright 2026  MDD Engine Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MDD_COMMON_H_
#define MDD_COMMON_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdd {

// Exit-code taxonomy for the CLI: usage errors map to 1, data/format errors
// to 2, numeric failures (non-finite loss, failed self-check) to 3.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string &msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

#define MDD_REQUIRE(cond, msg)                  \
  do {                                          \
    if (!(cond)) throw ::mdd::UsageError(msg);  \
  } while (0)

constexpr double kLogZero = -1e30;

inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

// splitmix64; used to derive independent per-stage / per-utterance seeds
// from one master seed.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace mdd

#endif  // MDD_COMMON_H_
