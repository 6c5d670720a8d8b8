// src/hybrid.cc

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

#include "mdd/hybrid.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdd {

HybridLossResult HybridLoss(const ModelParams &m, const Matrix &feats,
                            const std::vector<int> &targets, double lambda,
                            ModelParams *grads, double grad_scale) {
  MDD_REQUIRE(lambda >= 0.0 && lambda <= 1.0, "lambda must be in [0, 1]");
  const bool need_grads = grads != nullptr;

  EncoderCache enc_cache;
  Matrix h_enc = Encode(m, feats, need_grads ? &enc_cache : nullptr);
  Matrix dh_enc(h_enc.NumRows(), h_enc.NumCols());

  HybridLossResult res;

  if (lambda > 0.0) {
    CtcHeadCache head_cache;
    Matrix lp = CtcHead(m, h_enc, need_grads ? &head_cache : nullptr);
    CtcLossResult ctc = CtcLoss(lp, targets, m.CtcBlankClass());
    res.ctc_loss = ctc.loss;
    res.ctc_feasible = ctc.feasible;
    if (need_grads && ctc.feasible) {
      Matrix dlp = ctc.dlog_probs;
      for (auto &x : dlp.Data()) x *= lambda * grad_scale;
      CtcHeadBackward(m, h_enc, head_cache, dlp, grads, &dh_enc);
    }
  }

  if (lambda < 1.0) {
    res.att_loss = AttentionNll(m, h_enc, targets,
                                need_grads ? grads : nullptr,
                                need_grads ? &dh_enc : nullptr,
                                (1.0 - lambda) * grad_scale);
  } else {
    // Endpoint: report the attention loss without differentiating it.
    res.att_loss = AttentionNll(m, h_enc, targets, nullptr, nullptr);
  }

  if (need_grads) EncodeBackward(m, enc_cache, dh_enc, grads, nullptr);

  double ctc_part = (lambda == 0.0) ? 0.0 : lambda * res.ctc_loss;
  double att_part = (lambda == 1.0) ? 0.0 : (1.0 - lambda) * res.att_loss;
  res.loss = ctc_part + att_part;
  return res;
}

namespace {

struct Hypothesis {
  std::vector<int> ids;
  double att_lp = 0.0;
  double ctc_psi = 0.0;
  double joint = 0.0;
  DecoderState state;
  CtcPrefixScorer::State ctc_state;
  std::vector<Vec> att_rows;
};

bool BetterHyp(const Hypothesis &a, const Hypothesis &b) {
  if (a.joint != b.joint) return a.joint > b.joint;
  return a.ids < b.ids;  // deterministic tie-break
}

}  // namespace

DecodeResult JointBeamDecode(const ModelParams &m, const Matrix &feats,
                             const HybridConfig &cfg) {
  cfg.Validate();
  Matrix h_enc = Encode(m, feats, nullptr);
  const int S = h_enc.NumRows();
  if (S < 1) throw DataError("joint_beam_decode: empty encoder output");
  const int num_phones = m.inv.NumPhones();
  const double lambda = cfg.lambda;
  const int max_steps = cfg.max_steps > 0 ? cfg.max_steps : 2 * S;

  Matrix ctc_lp = CtcHead(m, h_enc, nullptr);
  CtcPrefixScorer scorer(ctc_lp, m.CtcBlankClass());

  Hypothesis root;
  root.state = InitDecoderState(m, S);
  root.ctc_state = scorer.InitialState();
  root.joint = 0.0;
  std::vector<Hypothesis> active{root};

  bool have_complete = false;
  Hypothesis best_complete;
  auto offer_complete = [&](Hypothesis &&h) {
    if (!have_complete || BetterHyp(h, best_complete)) {
      best_complete = std::move(h);
      have_complete = true;
    }
  };

  for (int step = 0; step < max_steps && !active.empty(); ++step) {
    // eos competes with phone extensions inside the beam; hypotheses whose
    // eos survives pruning move to the finished set (with the CTC score
    // switched to the complete-sequence score).
    std::vector<Hypothesis> candidates;
    candidates.reserve(active.size() * (num_phones + 1));
    for (const Hypothesis &hyp : active) {
      int y_prev = hyp.ids.empty() ? m.inv.SosId() : hyp.ids.back();
      DecoderState next;
      Vec log_probs = DecoderStep(m, y_prev, hyp.state, h_enc, &next, nullptr);

      Hypothesis done = hyp;
      done.att_lp += log_probs[m.AttEosClass()];
      done.ctc_psi = scorer.CompleteLogProb(hyp.ctc_state);
      done.joint = lambda * done.ctc_psi + (1.0 - lambda) * done.att_lp;
      done.ids.push_back(-1);  // eos marker, stripped on completion
      candidates.push_back(std::move(done));

      for (int c = 0; c < num_phones; ++c) {
        Hypothesis ext;
        ext.ids = hyp.ids;
        ext.ids.push_back(c);
        ext.att_lp = hyp.att_lp + log_probs[c];
        double psi = 0.0;
        ext.ctc_state = scorer.Extend(hyp.ctc_state, c, &psi);
        ext.ctc_psi = psi;
        ext.joint = lambda * psi + (1.0 - lambda) * ext.att_lp;
        ext.state = next;
        ext.att_rows = hyp.att_rows;
        ext.att_rows.push_back(next.align);
        candidates.push_back(std::move(ext));
      }
    }
    std::sort(candidates.begin(), candidates.end(), BetterHyp);
    if (static_cast<int>(candidates.size()) > cfg.beam)
      candidates.resize(cfg.beam);
    std::vector<Hypothesis> survivors;
    for (Hypothesis &c : candidates) {
      if (!c.ids.empty() && c.ids.back() == -1) {
        c.ids.pop_back();
        offer_complete(std::move(c));
      } else {
        survivors.push_back(std::move(c));
      }
    }
    active = std::move(survivors);
  }

  DecodeResult out;
  if (have_complete) {
    out.reached_eos = true;
  } else {
    // Step cap hit with no eos: finalize the best active hypothesis.
    MDD_REQUIRE(!active.empty(), "joint_beam_decode: no hypotheses");
    best_complete = active.front();
    for (const auto &h : active)
      if (BetterHyp(h, best_complete)) best_complete = h;
    best_complete.ctc_psi = scorer.CompleteLogProb(best_complete.ctc_state);
    best_complete.joint = lambda * best_complete.ctc_psi +
                          (1.0 - lambda) * best_complete.att_lp;
    out.reached_eos = false;
  }

  out.ids = best_complete.ids;
  out.phones = m.inv.Decode(out.ids);
  out.joint_score = best_complete.joint;
  out.ctc_score = best_complete.ctc_psi;
  out.att_score = best_complete.att_lp;
  out.attention = Matrix(static_cast<int>(best_complete.att_rows.size()), S);
  for (size_t l = 0; l < best_complete.att_rows.size(); ++l)
    out.attention.SetRow(static_cast<int>(l), best_complete.att_rows[l]);
  return out;
}

DecodeResult CtcGreedyDecodeUtterance(const ModelParams &m,
                                      const Matrix &feats) {
  Matrix h_enc = Encode(m, feats, nullptr);
  Matrix lp = CtcHead(m, h_enc, nullptr);
  DecodeResult out;
  out.ids = CtcGreedyDecode(lp, m.CtcBlankClass());
  out.phones = m.inv.Decode(out.ids);
  out.ctc_score = CtcCompleteLogProb(lp, out.ids, m.CtcBlankClass());
  out.joint_score = out.ctc_score;
  out.attention = Matrix(0, h_enc.NumRows());
  return out;
}

}  // namespace mdd
