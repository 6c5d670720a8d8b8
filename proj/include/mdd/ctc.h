// include/mdd/ctc.h

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

// CTC branch: frame-level label log probabilities, log-space
// forward-backward loss with analytic gradient, greedy decoding, prefix
// scoring for joint beam search, and an exponential-enumeration oracle used
// by the tests.

#ifndef MDD_CTC_H_
#define MDD_CTC_H_

#include <vector>

#include "mdd/model.h"

namespace mdd {

struct CtcHeadCache {
  Matrix log_probs;  // S x V, rows log-normalized
};

// Per-frame log softmax over U + blank; blank is the last class.
Matrix CtcHead(const ModelParams &m, const Matrix &h_enc, CtcHeadCache *cache);
void CtcHeadBackward(const ModelParams &m, const Matrix &h_enc,
                     const CtcHeadCache &cache, const Matrix &dlog_probs,
                     ModelParams *grads, Matrix *dh_enc);

struct CtcLossResult {
  double loss = 0.0;   // -log P(target | frames); +inf when infeasible
  Matrix dlog_probs;   // same shape as input; zero when infeasible
  bool feasible = true;
};

// Forward-backward over the blank-expanded target (length 2L+1). Targets
// are class indices and must exclude the blank. A target needing more
// frames than available (mandatory separating blanks between repeats)
// yields +inf loss with zero gradient, flagged infeasible.
CtcLossResult CtcLoss(const Matrix &log_probs, const std::vector<int> &targets,
                      int blank);

// Sums per-frame probability products over every frame-wise sequence that
// collapses (remove repeats, then blanks) to the target. S <= 8 guard.
double CtcBruteForce(const Matrix &probs, const std::vector<int> &target,
                     int blank);

std::vector<int> CollapseCtcPath(const std::vector<int> &path, int blank);

// Per-frame argmax, collapse repeats, strip blanks.
std::vector<int> CtcGreedyDecode(const Matrix &log_probs, int blank);

// Incremental prefix scoring over the frame axis. psi(prefix) is the log
// probability that the collapsed frame sequence begins with the prefix;
// the complete score constrains it to equal the prefix exactly.
class CtcPrefixScorer {
 public:
  CtcPrefixScorer(const Matrix &log_probs, int blank);

  struct State {
    Vec r_nb, r_b;  // log probs over frames consumed (index = frame count)
    int last = -1;  // last symbol of the prefix; -1 for the empty prefix
  };

  State InitialState() const;
  // Extends the prefix by symbol c; *psi receives the new prefix log prob.
  State Extend(const State &state, int c, double *psi) const;
  double CompleteLogProb(const State &state) const;

 private:
  const Matrix &lp_;
  int blank_;
};

// log P(collapsed sequence begins with prefix); 0 for the empty prefix.
double CtcPrefixLogProb(const Matrix &log_probs,
                        const std::vector<int> &prefix, int blank);
// log P(collapsed sequence equals prefix); consistent with CtcLoss.
double CtcCompleteLogProb(const Matrix &log_probs,
                          const std::vector<int> &prefix, int blank);

}  // namespace mdd

#endif  // MDD_CTC_H_
