// src/selftest.cc

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

#include "mdd/selftest.h"

#include <algorithm>
#include <cmath>

#include "mdd/hybrid.h"

namespace mdd {

double RelError(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-3);
}

double CentralDiff(const std::function<double()> &f, double *x, double step) {
  const double saved = *x;
  *x = saved + step;
  const double up = f();
  *x = saved - step;
  const double down = f();
  *x = saved;
  return (up - down) / (2.0 * step);
}

namespace {

void FlattenVec(Vec &v, std::vector<double *> *out) {
  for (double &x : v) out->push_back(&x);
}

std::vector<double *> FlattenModel(ModelParams *m) {
  std::vector<double *> out;
  VisitParams(*m, [&out](Vec &v) { FlattenVec(v, &out); });
  return out;
}

// Compares analytic[i] against the central difference at *coords[i]. With
// max_samples < size, a random subset of coordinates is checked.
double MaxGradError(const std::function<double()> &f,
                    const std::vector<double *> &coords,
                    const std::vector<double *> &analytic, int max_samples,
                    Rng *rng) {
  MDD_REQUIRE(coords.size() == analytic.size(),
              "coordinate/gradient lists must be parallel");
  const int n = static_cast<int>(coords.size());
  double worst = 0.0;
  if (max_samples <= 0 || max_samples >= n) {
    for (int i = 0; i < n; ++i)
      worst = std::max(worst,
                       RelError(*analytic[i], CentralDiff(f, coords[i], kFdStep)));
  } else {
    for (int s = 0; s < max_samples; ++s) {
      const int i = rng->UniformInt(n);
      worst = std::max(worst,
                       RelError(*analytic[i], CentralDiff(f, coords[i], kFdStep)));
    }
  }
  return worst;
}

void FillRandom(Matrix *m, Rng *rng, double scale = 1.0) {
  for (double &x : m->Data()) x = rng->Uniform(-scale, scale);
}

void FillRandom(Vec *v, Rng *rng, double scale = 1.0) {
  for (double &x : *v) x = rng->Uniform(-scale, scale);
}

double LinbGradErr(uint64_t seed, bool corrupt) {
  Rng rng(seed);
  const int out = 5, in = 7;
  LinParams p(out, in);
  FillRandom(&p.w, &rng);
  FillRandom(&p.b, &rng);
  Vec x(in), dy(out);
  FillRandom(&x, &rng);
  FillRandom(&dy, &rng);

  LinParams g(out, in);
  Vec dx(in, 0.0);
  LinbBackward(p, x, dy, &g, &dx);
  if (corrupt) g.w.Data()[0] += 1.0;

  auto f = [&]() { return Dot(dy, Linb(p, x)); };
  std::vector<double *> coords, analytic;
  FlattenVec(p.w.Data(), &coords);
  FlattenVec(p.b, &coords);
  FlattenVec(x, &coords);
  FlattenVec(g.w.Data(), &analytic);
  FlattenVec(g.b, &analytic);
  FlattenVec(dx, &analytic);
  return MaxGradError(f, coords, analytic, 0, &rng);
}

}  // namespace

double CheckLinbGradient(uint64_t seed) { return LinbGradErr(seed, false); }

double CheckLstmStepGradient(uint64_t seed) {
  Rng rng(seed);
  const int X = 4, H = 3;
  LstmParams p(X, H);
  FillRandom(&p.wx, &rng);
  FillRandom(&p.wh, &rng);
  FillRandom(&p.b, &rng);
  Vec x(X), h_prev(H), c_prev(H), dh(H), dc(H);
  FillRandom(&x, &rng);
  FillRandom(&h_prev, &rng);
  FillRandom(&c_prev, &rng);
  FillRandom(&dh, &rng);
  FillRandom(&dc, &rng);

  LstmCache cache;
  Vec h, c;
  LstmStep(p, x, h_prev, c_prev, &h, &c, &cache);
  LstmParams g(X, H);
  Vec dx(X, 0.0), dhp(H, 0.0), dcp(H, 0.0);
  LstmStepBackward(p, cache, dh, dc, &g, &dx, &dhp, &dcp);

  auto f = [&]() {
    LstmCache tmp;
    Vec ho, co;
    LstmStep(p, x, h_prev, c_prev, &ho, &co, &tmp);
    return Dot(dh, ho) + Dot(dc, co);
  };
  std::vector<double *> coords, analytic;
  FlattenVec(p.wx.Data(), &coords);
  FlattenVec(p.wh.Data(), &coords);
  FlattenVec(p.b, &coords);
  FlattenVec(x, &coords);
  FlattenVec(h_prev, &coords);
  FlattenVec(c_prev, &coords);
  FlattenVec(g.wx.Data(), &analytic);
  FlattenVec(g.wh.Data(), &analytic);
  FlattenVec(g.b, &analytic);
  FlattenVec(dx, &analytic);
  FlattenVec(dhp, &analytic);
  FlattenVec(dcp, &analytic);
  return MaxGradError(f, coords, analytic, 0, &rng);
}

double CheckBlstmGradient(uint64_t seed) {
  Rng rng(seed);
  const int T = 5, F = 4, H = 3;
  BlstmParams p(F, H);
  FillRandom(&p.fwd.wx, &rng);
  FillRandom(&p.fwd.wh, &rng);
  FillRandom(&p.fwd.b, &rng);
  FillRandom(&p.bwd.wx, &rng);
  FillRandom(&p.bwd.wh, &rng);
  FillRandom(&p.bwd.b, &rng);
  Matrix seq(T, F), dout(T, 2 * H);
  FillRandom(&seq, &rng);
  FillRandom(&dout, &rng);

  BlstmCache cache;
  Matrix out = BlstmForward(p, seq, &cache);
  BlstmParams g(F, H);
  Matrix dseq(T, F);
  BlstmBackward(p, cache, dout, &g, &dseq);

  auto f = [&]() {
    BlstmCache tmp;
    Matrix o = BlstmForward(p, seq, &tmp);
    return Dot(o.Data(), dout.Data());
  };
  std::vector<double *> coords, analytic;
  for (LstmParams *lp : {&p.fwd, &p.bwd}) {
    FlattenVec(lp->wx.Data(), &coords);
    FlattenVec(lp->wh.Data(), &coords);
    FlattenVec(lp->b, &coords);
  }
  FlattenVec(seq.Data(), &coords);
  for (LstmParams *lp : {&g.fwd, &g.bwd}) {
    FlattenVec(lp->wx.Data(), &analytic);
    FlattenVec(lp->wh.Data(), &analytic);
    FlattenVec(lp->b, &analytic);
  }
  FlattenVec(dseq.Data(), &analytic);
  return MaxGradError(f, coords, analytic, 0, &rng);
}

double CheckAttendGradient(uint64_t seed) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.att_dim = 4;
  cfg.dec_hidden = 3;
  cfg.enc_hidden = 3;  // De = 6
  cfg.att_filters = 2;
  cfg.att_kernel = 3;
  const int S = 5, De = cfg.EncoderOutDim();
  AttentionParams p(cfg);
  FillRandom(&p.w_dec, &rng);
  FillRandom(&p.w_enc, &rng);
  FillRandom(&p.w_loc, &rng);
  FillRandom(&p.conv, &rng);
  FillRandom(&p.b, &rng);
  FillRandom(&p.v, &rng);
  Vec h_dec(cfg.dec_hidden);
  FillRandom(&h_dec, &rng);
  Vec raw(S);
  FillRandom(&raw, &rng);
  Vec prev_align = Softmax(raw);
  Matrix h_enc(S, De);
  FillRandom(&h_enc, &rng);
  Vec dctx(De), dal(S);
  FillRandom(&dctx, &rng);
  FillRandom(&dal, &rng);

  AttendCache cache;
  Vec context, align;
  Attend(p, h_dec, prev_align, h_enc, &context, &align, &cache);
  AttentionParams g(cfg);
  Vec dh_dec(cfg.dec_hidden, 0.0), dprev(S, 0.0);
  Matrix dh_enc(S, De);
  AttendBackward(p, h_enc, cache, dctx, dal, &g, &dh_dec, &dprev, &dh_enc);

  auto f = [&]() {
    AttendCache tmp;
    Vec ctx, al;
    Attend(p, h_dec, prev_align, h_enc, &ctx, &al, &tmp);
    return Dot(dctx, ctx) + Dot(dal, al);
  };
  std::vector<double *> coords, analytic;
  for (Matrix *m : {&p.w_dec, &p.w_enc, &p.w_loc, &p.conv})
    FlattenVec(m->Data(), &coords);
  FlattenVec(p.b, &coords);
  FlattenVec(p.v, &coords);
  FlattenVec(h_dec, &coords);
  FlattenVec(prev_align, &coords);
  FlattenVec(h_enc.Data(), &coords);
  for (Matrix *m : {&g.w_dec, &g.w_enc, &g.w_loc, &g.conv})
    FlattenVec(m->Data(), &analytic);
  FlattenVec(g.b, &analytic);
  FlattenVec(g.v, &analytic);
  FlattenVec(dh_dec, &analytic);
  FlattenVec(dprev, &analytic);
  FlattenVec(dh_enc.Data(), &analytic);
  return MaxGradError(f, coords, analytic, 0, &rng);
}

namespace {

ModelConfig TinyConfig() {
  ModelConfig cfg;
  cfg.feat_dim = 4;
  cfg.enc_layers = 2;
  cfg.enc_hidden = 3;
  cfg.subsample_factor = 2;
  cfg.dec_hidden = 3;
  cfg.embed_dim = 3;
  cfg.att_dim = 4;
  cfg.att_filters = 2;
  cfg.att_kernel = 3;
  return cfg;
}

PhoneInventory TinyInventory() {
  return BuildInventory({"a", "b", "c"}, AntiMode::kPerPhoneAnti);
}

}  // namespace

double CheckAttentionNllGradient(uint64_t seed) {
  Rng rng(seed);
  const ModelConfig cfg = TinyConfig();
  const PhoneInventory inv = TinyInventory();
  ModelParams m = InitModel(cfg, inv, rng.NextU64());
  const int S = 5, De = cfg.EncoderOutDim();
  Matrix h_enc(S, De);
  FillRandom(&h_enc, &rng);
  const std::vector<int> targets = {0, 4, 1};

  ModelParams grads = ZeroLike(m);
  Matrix dh_enc(S, De);
  AttentionNll(m, h_enc, targets, &grads, &dh_enc, 1.0);

  auto f = [&]() { return AttentionNll(m, h_enc, targets, nullptr, nullptr); };
  std::vector<double *> coords, analytic;
  auto add_att_dec = [](ModelParams *mp, std::vector<double *> *out) {
    for (Matrix *w : {&mp->att.w_dec, &mp->att.w_enc, &mp->att.w_loc,
                      &mp->att.conv})
      FlattenVec(w->Data(), out);
    FlattenVec(mp->att.b, out);
    FlattenVec(mp->att.v, out);
    FlattenVec(mp->dec.embed.Data(), out);
    FlattenVec(mp->dec.cell.wx.Data(), out);
    FlattenVec(mp->dec.cell.wh.Data(), out);
    FlattenVec(mp->dec.cell.b, out);
    FlattenVec(mp->dec.readout.w.Data(), out);
    FlattenVec(mp->dec.readout.b, out);
  };
  add_att_dec(&m, &coords);
  FlattenVec(h_enc.Data(), &coords);
  add_att_dec(&grads, &analytic);
  FlattenVec(dh_enc.Data(), &analytic);
  return MaxGradError(f, coords, analytic, 400, &rng);
}

double CheckCtcLossGradient(uint64_t seed) {
  Rng rng(seed);
  const int S = 6, V = 4;  // 3 labels + blank
  Matrix lp(S, V);
  FillRandom(&lp, &rng, 2.0);
  const std::vector<int> targets = {0, 1, 0};
  const int blank = 3;

  CtcLossResult res = CtcLoss(lp, targets, blank);
  MDD_REQUIRE(res.feasible, "selftest CTC target must be feasible");

  auto f = [&]() { return CtcLoss(lp, targets, blank).loss; };
  std::vector<double *> coords, analytic;
  FlattenVec(lp.Data(), &coords);
  FlattenVec(res.dlog_probs.Data(), &analytic);
  return MaxGradError(f, coords, analytic, 0, &rng);
}

double CheckHybridGradient(uint64_t seed, double lambda) {
  Rng rng(seed);
  const ModelConfig cfg = TinyConfig();
  const PhoneInventory inv = TinyInventory();
  ModelParams m = InitModel(cfg, inv, rng.NextU64());
  const int T = 8;
  Matrix feats(T, cfg.feat_dim);
  FillRandom(&feats, &rng);
  const std::vector<int> targets = {0, 4};

  ModelParams grads = ZeroLike(m);
  HybridLossResult res = HybridLoss(m, feats, targets, lambda, &grads);
  MDD_REQUIRE(res.ctc_feasible, "selftest hybrid target must be CTC-feasible");

  auto f = [&]() { return HybridLoss(m, feats, targets, lambda).loss; };
  std::vector<double *> coords = FlattenModel(&m);
  std::vector<double *> analytic = FlattenModel(&grads);
  return MaxGradError(f, coords, analytic, 300, &rng);
}

double CheckCtcOracle(int max_frames, int max_labels, int num_classes,
                      int draws, uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int S = 1; S <= max_frames; ++S) {
    for (int L = 1; L <= max_labels; ++L) {
      for (int V = 1; V <= num_classes; ++V) {
        for (int d = 0; d < draws; ++d) {
          Matrix probs(S, V + 1), lp(S, V + 1);
          for (int t = 0; t < S; ++t) {
            Vec logits(V + 1);
            FillRandom(&logits, &rng, 2.0);
            Vec row = Softmax(logits);
            probs.SetRow(t, row);
            for (int k = 0; k <= V; ++k) lp(t, k) = std::log(row[k]);
          }
          std::vector<int> target(L);
          for (int &c : target) c = rng.UniformInt(V);

          const double brute = CtcBruteForce(probs, target, V);
          CtcLossResult res = CtcLoss(lp, target, V);
          if (!res.feasible) {
            if (brute != 0.0) worst = std::max(worst, 1.0);
            continue;
          }
          worst = std::max(worst, std::abs(res.loss - (-std::log(brute))));
        }
      }
    }
  }
  return worst;
}

double CheckMetricArithmetic() {
  // Published two-decimal (precision, recall, F1) triples, percent scale.
  const double cases[][3] = {
      {46.57, 70.28, 56.02}, {38.99, 53.12, 44.97}, {19.42, 52.19, 28.31},
      {41.17, 76.48, 53.52}, {43.89, 64.54, 52.25}};
  double worst = 0.0;
  for (const auto &c : cases) {
    const double f1 = 2.0 * c[0] * c[1] / (c[0] + c[1]);
    worst = std::max(worst, std::abs(f1 - c[2]));
  }
  return worst;
}

std::vector<CheckResult> RunSelftestChecks(bool corrupt_gradient) {
  std::vector<CheckResult> out;
  auto add = [&out](const std::string &name, double value, double tol) {
    out.push_back({name, value <= tol, value, tol});
  };
  add("ctc-oracle", CheckCtcOracle(4, 3, 3, 25, 7), 1e-10);
  add("grad-linb", LinbGradErr(11, corrupt_gradient), kGradTol);
  add("grad-lstm-step", CheckLstmStepGradient(12), kGradTol);
  add("grad-blstm-layer", CheckBlstmGradient(13), kGradTol);
  add("grad-attention-step", CheckAttendGradient(14), kGradTol);
  add("grad-attention-nll", CheckAttentionNllGradient(15), kGradTol);
  add("grad-ctc-loss", CheckCtcLossGradient(16), kGradTol);
  add("grad-hybrid-loss", CheckHybridGradient(17, 0.5), kGradTol);
  add("metric-arithmetic", CheckMetricArithmetic(), 0.01);
  return out;
}

int RunSelftest(std::ostream &os, bool corrupt_gradient) {
  bool all_ok = true;
  for (const CheckResult &r : RunSelftestChecks(corrupt_gradient)) {
    os << (r.ok ? "PASS" : "FAIL") << " " << r.name << " (max err " << r.value
       << ", tol " << r.tol << ")\n";
    all_ok = all_ok && r.ok;
  }
  os << (all_ok ? "selftest: all checks passed\n"
                : "selftest: FAILURES detected\n");
  return all_ok ? 0 : 3;
}

}  // namespace mdd
