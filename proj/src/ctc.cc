// src/ctc.cc

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

#include "mdd/ctc.h"

#include <cmath>
#include <limits>

namespace mdd {

Matrix CtcHead(const ModelParams &m, const Matrix &h_enc,
               CtcHeadCache *cache) {
  if (h_enc.NumRows() < 1) throw DataError("ctc_head: empty encoder output");
  const int S = h_enc.NumRows();
  const int V = m.NumCtcClasses();
  Matrix lp(S, V);
  for (int s = 0; s < S; ++s) {
    Vec row = LogSoftmax(Linb(m.ctc_head, h_enc.Row(s)));
    lp.SetRow(s, row);
  }
  if (cache != nullptr) cache->log_probs = lp;
  return lp;
}

void CtcHeadBackward(const ModelParams &m, const Matrix &h_enc,
                     const CtcHeadCache &cache, const Matrix &dlog_probs,
                     ModelParams *grads, Matrix *dh_enc) {
  const int S = h_enc.NumRows();
  const int V = cache.log_probs.NumCols();
  for (int s = 0; s < S; ++s) {
    Vec dlogits(V, 0.0);
    LogSoftmaxBackward(cache.log_probs.Row(s), dlog_probs.Row(s), &dlogits);
    Vec dh(h_enc.NumCols(), 0.0);
    LinbBackward(m.ctc_head, h_enc.Row(s), dlogits,
                 grads != nullptr ? &grads->ctc_head : nullptr,
                 dh_enc != nullptr ? &dh : nullptr);
    if (dh_enc != nullptr)
      for (int c = 0; c < h_enc.NumCols(); ++c) (*dh_enc)(s, c) += dh[c];
  }
}

CtcLossResult CtcLoss(const Matrix &log_probs, const std::vector<int> &targets,
                      int blank) {
  const int S = log_probs.NumRows();
  const int V = log_probs.NumCols();
  const int L = static_cast<int>(targets.size());
  if (L == 0) throw DataError("ctc_loss: empty target sequence");
  for (int y : targets) {
    if (y < 0 || y >= V) throw DataError("ctc_loss: target id out of range");
    if (y == blank) throw DataError("ctc_loss: blank in target sequence");
  }

  CtcLossResult res;
  res.dlog_probs = Matrix(S, V, 0.0);

  // Minimum frames: every label plus a separating blank between repeats.
  int min_frames = L;
  for (int i = 1; i < L; ++i)
    if (targets[i] == targets[i - 1]) ++min_frames;
  if (S < min_frames) {
    res.loss = std::numeric_limits<double>::infinity();
    res.feasible = false;
    return res;
  }

  // Blank-expanded target: blank y1 blank y2 ... blank yL blank.
  const int U = 2 * L + 1;
  auto label = [&](int u) { return (u % 2 == 0) ? blank : targets[u / 2]; };

  // alpha(t, u) includes the emission at frame t.
  Matrix alpha(S, U, kLogZero);
  alpha(0, 0) = log_probs(0, blank);
  alpha(0, 1) = log_probs(0, label(1));
  for (int t = 1; t < S; ++t) {
    for (int u = 0; u < U; ++u) {
      double a = alpha(t - 1, u);
      if (u >= 1) a = LogAdd(a, alpha(t - 1, u - 1));
      if (u >= 2 && label(u) != blank && label(u) != label(u - 2))
        a = LogAdd(a, alpha(t - 1, u - 2));
      alpha(t, u) = a + log_probs(t, label(u));
    }
  }
  double log_p = LogAdd(alpha(S - 1, U - 1), alpha(S - 1, U - 2));
  if (log_p <= kLogZero / 2) {
    res.loss = std::numeric_limits<double>::infinity();
    res.feasible = false;
    return res;
  }
  res.loss = -log_p;

  // beta(t, u) excludes the emission at frame t, so alpha + beta counts
  // each frame's emission exactly once along every path through (t, u).
  Matrix beta(S, U, kLogZero);
  beta(S - 1, U - 1) = 0.0;
  beta(S - 1, U - 2) = 0.0;
  for (int t = S - 2; t >= 0; --t) {
    for (int u = 0; u < U; ++u) {
      double b = beta(t + 1, u) + log_probs(t + 1, label(u));
      if (u + 1 < U)
        b = LogAdd(b, beta(t + 1, u + 1) + log_probs(t + 1, label(u + 1)));
      if (u + 2 < U && label(u + 2) != blank && label(u + 2) != label(u))
        b = LogAdd(b, beta(t + 1, u + 2) + log_probs(t + 1, label(u + 2)));
      beta(t, u) = b;
    }
  }

  // d(-log P)/d lp(t, k) = -sum_{u: label(u)=k} exp(alpha+beta - log P).
  for (int t = 0; t < S; ++t) {
    Vec acc(V, kLogZero);
    for (int u = 0; u < U; ++u) {
      int k = label(u);
      acc[k] = LogAdd(acc[k], alpha(t, u) + beta(t, u));
    }
    for (int k = 0; k < V; ++k)
      if (acc[k] > kLogZero / 2)
        res.dlog_probs(t, k) = -std::exp(acc[k] - log_p);
  }
  return res;
}

std::vector<int> CollapseCtcPath(const std::vector<int> &path, int blank) {
  std::vector<int> out;
  int prev = blank;
  for (int p : path) {
    if (p != blank && p != prev) out.push_back(p);
    prev = p;
  }
  return out;
}

double CtcBruteForce(const Matrix &probs, const std::vector<int> &target,
                     int blank) {
  const int S = probs.NumRows();
  const int V = probs.NumCols();
  if (S > 8) throw UsageError("ctc_brute_force: S > 8 enumeration guard");

  double total = 0.0;
  std::vector<int> path(S, 0);
  while (true) {
    if (CollapseCtcPath(path, blank) == target) {
      double p = 1.0;
      for (int t = 0; t < S; ++t) p *= probs(t, path[t]);
      total += p;
    }
    int pos = S - 1;
    while (pos >= 0 && ++path[pos] == V) path[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

std::vector<int> CtcGreedyDecode(const Matrix &log_probs, int blank) {
  std::vector<int> path(log_probs.NumRows());
  for (int t = 0; t < log_probs.NumRows(); ++t) {
    int best = 0;
    for (int k = 1; k < log_probs.NumCols(); ++k)
      if (log_probs(t, k) > log_probs(t, best)) best = k;
    path[t] = best;
  }
  return CollapseCtcPath(path, blank);
}

CtcPrefixScorer::CtcPrefixScorer(const Matrix &log_probs, int blank)
    : lp_(log_probs), blank_(blank) {}

CtcPrefixScorer::State CtcPrefixScorer::InitialState() const {
  const int S = lp_.NumRows();
  State st;
  st.last = -1;
  st.r_nb.assign(S + 1, kLogZero);
  st.r_b.assign(S + 1, kLogZero);
  st.r_b[0] = 0.0;  // no frames consumed, nothing emitted
  for (int t = 1; t <= S; ++t)
    st.r_b[t] = st.r_b[t - 1] + lp_(t - 1, blank_);
  return st;
}

CtcPrefixScorer::State CtcPrefixScorer::Extend(const State &state, int c,
                                               double *psi) const {
  const int S = lp_.NumRows();
  if (c < 0 || c >= lp_.NumCols() || c == blank_)
    throw DataError("ctc_prefix: invalid extension symbol");
  State out;
  out.last = c;
  out.r_nb.assign(S + 1, kLogZero);
  out.r_b.assign(S + 1, kLogZero);
  double psi_acc = kLogZero;
  for (int t = 1; t <= S; ++t) {
    // New-emission mass: the base prefix ended in blank, or in a different
    // symbol (a repeat without separating blank would collapse).
    double phi = state.r_b[t - 1];
    if (c != state.last) phi = LogAdd(phi, state.r_nb[t - 1]);
    double em = lp_(t - 1, c);
    out.r_nb[t] = LogAdd(out.r_nb[t - 1], phi) + em;
    out.r_b[t] = LogAdd(out.r_b[t - 1], out.r_nb[t - 1]) + lp_(t - 1, blank_);
    psi_acc = LogAdd(psi_acc, phi + em);
  }
  if (psi != nullptr) *psi = psi_acc;
  return out;
}

double CtcPrefixScorer::CompleteLogProb(const State &state) const {
  const int S = lp_.NumRows();
  return LogAdd(state.r_nb[S], state.r_b[S]);
}

double CtcPrefixLogProb(const Matrix &log_probs, const std::vector<int> &prefix,
                        int blank) {
  CtcPrefixScorer scorer(log_probs, blank);
  auto st = scorer.InitialState();
  double psi = 0.0;
  for (int c : prefix) st = scorer.Extend(st, c, &psi);
  return psi;
}

double CtcCompleteLogProb(const Matrix &log_probs,
                          const std::vector<int> &prefix, int blank) {
  CtcPrefixScorer scorer(log_probs, blank);
  auto st = scorer.InitialState();
  for (int c : prefix) st = scorer.Extend(st, c, nullptr);
  return scorer.CompleteLogProb(st);
}

}  // namespace mdd
