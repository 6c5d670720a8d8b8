// include/mdd/selftest.h

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

// Built-in numerical verification: central finite-difference gradient
// checks for every differentiable block, a brute-force CTC oracle sweep,
// and detection-metric arithmetic checks. Shared by the `selftest` CLI
// command, the unit tests and the acceptance gate.

#ifndef MDD_SELFTEST_H_
#define MDD_SELFTEST_H_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "mdd/model.h"

namespace mdd {

// |a - b| / max(|a| + |b|, 1e-3); the floor turns near-zero gradients into
// an absolute comparison at 1e-7 scale for the 1e-4 relative tolerance.
double RelError(double a, double b);

// Central difference (f(+h) - f(-h)) / 2h at *x; restores *x.
double CentralDiff(const std::function<double()> &f, double *x, double step);

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradTol = 1e-4;

// Each returns the maximum relative error between the analytic gradient and
// central finite differences over every checked coordinate.
double CheckLinbGradient(uint64_t seed);
double CheckLstmStepGradient(uint64_t seed);
double CheckBlstmGradient(uint64_t seed);
double CheckAttendGradient(uint64_t seed);
double CheckAttentionNllGradient(uint64_t seed);
double CheckCtcLossGradient(uint64_t seed);
double CheckHybridGradient(uint64_t seed, double lambda);

// Max |forward-backward loss - (-log brute-force path sum)| over all
// (frames, labels) shapes up to the given bounds, `draws` random
// frame-probability draws each.
double CheckCtcOracle(int max_frames, int max_labels, int num_classes,
                      int draws, uint64_t seed);

// Max |F1(pr, re) - expected| over the published two-decimal pairs.
double CheckMetricArithmetic();

struct CheckResult {
  std::string name;
  bool ok = false;
  double value = 0.0;  // max error observed
  double tol = 0.0;
};

// corrupt_gradient is a negative-control hook: one analytic gradient entry
// is perturbed before comparison, which must make the suite fail.
std::vector<CheckResult> RunSelftestChecks(bool corrupt_gradient = false);

// Prints one pass/fail line per group; returns 0 on success, 3 on failure.
int RunSelftest(std::ostream &os, bool corrupt_gradient = false);

}  // namespace mdd

#endif  // MDD_SELFTEST_H_
