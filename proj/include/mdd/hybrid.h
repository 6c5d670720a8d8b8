// include/mdd/hybrid.h

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

#ifndef MDD_HYBRID_H_
#define MDD_HYBRID_H_

#include <string>
#include <vector>

#include "mdd/ctc.h"
#include "mdd/encoder-decoder.h"

namespace mdd {

struct HybridConfig {
  double lambda = 0.5;  // CTC weight, shared by training and decoding
  int beam = 4;
  int max_steps = 0;  // 0: hard cap of 2 * num encoder frames

  void Validate() const {
    MDD_REQUIRE(lambda >= 0.0 && lambda <= 1.0, "lambda must be in [0, 1]");
    MDD_REQUIRE(beam >= 1, "beam must be >= 1");
    MDD_REQUIRE(max_steps >= 0, "max_steps must be >= 0");
  }
};

struct HybridLossResult {
  double loss = 0.0;      // lambda * ctc + (1 - lambda) * att
  double ctc_loss = 0.0;  // +inf when the target is CTC-infeasible
  double att_loss = 0.0;
  bool ctc_feasible = true;
};

// Interpolated loss on the shared encoder output. When grads is non-null,
// accumulates parameter gradients scaled by grad_scale. An endpoint lambda
// of exactly 0 (or 1) contributes nothing from the switched-off branch.
HybridLossResult HybridLoss(const ModelParams &m, const Matrix &feats,
                            const std::vector<int> &targets, double lambda,
                            ModelParams *grads = nullptr,
                            double grad_scale = 1.0);

struct DecodeResult {
  std::vector<int> ids;              // phone ids; never blank/sos/eos
  std::vector<std::string> phones;
  double joint_score = 0.0;
  double ctc_score = 0.0;
  double att_score = 0.0;
  Matrix attention;  // L x S attention weights per emitted symbol
  bool reached_eos = true;
};

// Length-synchronous beam search over attention decoder steps; each
// hypothesis is scored as lambda * ctc prefix score + (1 - lambda) *
// attention log probability, ending on eos (with the CTC score switched to
// the complete-sequence score) or at the step cap.
DecodeResult JointBeamDecode(const ModelParams &m, const Matrix &feats,
                             const HybridConfig &cfg);

// CTC-only ablation: greedy decode of the CTC head output.
DecodeResult CtcGreedyDecodeUtterance(const ModelParams &m,
                                      const Matrix &feats);

}  // namespace mdd

#endif  // MDD_HYBRID_H_
