// include/mdd/rng.h

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

#ifndef MDD_RNG_H_
#define MDD_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>

#include "mdd/common.h"

namespace mdd {

// Deterministic RNG. Distribution sampling is hand-rolled on top of the raw
// mt19937_64 stream (std distributions are not bit-stable across standard
// library implementations, and checkpoints / corpora must be reproducible
// from the seed alone).
class Rng {
 public:
  explicit Rng(uint64_t seed)
      : seed_(seed), gen_(SplitMix64(seed)), has_spare_(false), spare_(0.0) {}

  uint64_t NextU64() { return gen_(); }

  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  int UniformInt(int n) {
    return static_cast<int>(NextU64() % static_cast<uint64_t>(n));
  }

  // Standard normal via Box-Muller.
  double Gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform(), u2 = Uniform();
    while (u1 <= 1e-300) u1 = Uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream, e.g. one per utterance or per stage.
  Rng Fork(uint64_t stream) const {
    return Rng(SplitMix64(seed_ ^ SplitMix64(stream + 0x9e3779b97f4a7c15ULL)));
  }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_;
  double spare_;
};

}  // namespace mdd

#endif  // MDD_RNG_H_
