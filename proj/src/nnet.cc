// src/nnet.cc

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

#include "mdd/nnet.h"

#include <algorithm>
#include <cmath>

namespace mdd {

Vec Linb(const LinParams &p, const Vec &x) {
  if (static_cast<int>(x.size()) != p.InDim())
    throw DataError("linb: input size " + std::to_string(x.size()) +
                    " != expected " + std::to_string(p.InDim()));
  Vec y = p.b;
  AddMatVec(p.w, x, &y);
  return y;
}

void LinbBackward(const LinParams &p, const Vec &x, const Vec &dy,
                  LinParams *grad, Vec *dx) {
  if (grad != nullptr) {
    AddOuter(dy, x, &grad->w);
    AddVec(dy, &grad->b);
  }
  if (dx != nullptr) AddMatTVec(p.w, dy, dx);
}

Vec Softmax(const Vec &v) {
  if (v.empty()) throw DataError("softmax: empty input");
  double m = *std::max_element(v.begin(), v.end());
  Vec y(v.size());
  double sum = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    y[i] = std::exp(v[i] - m);
    sum += y[i];
  }
  for (auto &x : y) x /= sum;
  return y;
}

Vec LogSoftmax(const Vec &v) {
  if (v.empty()) throw DataError("log_softmax: empty input");
  double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  double lse = m + std::log(sum);
  Vec y(v.size());
  for (size_t i = 0; i < v.size(); ++i) y[i] = v[i] - lse;
  return y;
}

void SoftmaxBackward(const Vec &y, const Vec &dy, Vec *dv) {
  double dot = Dot(y, dy);
  for (size_t i = 0; i < y.size(); ++i) (*dv)[i] += y[i] * (dy[i] - dot);
}

void LogSoftmaxBackward(const Vec &log_y, const Vec &dz, Vec *dv) {
  double sum = 0.0;
  for (double d : dz) sum += d;
  for (size_t i = 0; i < log_y.size(); ++i)
    (*dv)[i] += dz[i] - std::exp(log_y[i]) * sum;
}

static inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void LstmStep(const LstmParams &p, const Vec &x, const Vec &h_prev,
              const Vec &c_prev, Vec *h_out, Vec *c_out, LstmCache *cache) {
  const int H = p.HiddenSize();
  if (static_cast<int>(x.size()) != p.InputSize())
    throw DataError("lstm_step: input size mismatch");
  if (static_cast<int>(h_prev.size()) != H ||
      static_cast<int>(c_prev.size()) != H)
    throw DataError("lstm_step: state size mismatch");

  Vec z = p.b;
  AddMatVec(p.wx, x, &z);
  AddMatVec(p.wh, h_prev, &z);

  Vec i(H), f(H), g(H), o(H), c(H), h(H), tc(H);
  for (int k = 0; k < H; ++k) {
    i[k] = Sigmoid(z[k]);
    f[k] = Sigmoid(z[H + k]);
    g[k] = std::tanh(z[2 * H + k]);
    o[k] = Sigmoid(z[3 * H + k]);
    c[k] = f[k] * c_prev[k] + i[k] * g[k];
    tc[k] = std::tanh(c[k]);
    h[k] = o[k] * tc[k];
  }
  *h_out = h;
  *c_out = c;
  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->c_prev = c_prev;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c = std::move(c);
    cache->h = std::move(h);
    cache->tanh_c = std::move(tc);
  }
}

void LstmStepBackward(const LstmParams &p, const LstmCache &cache,
                      const Vec &dh, const Vec &dc, LstmParams *grad,
                      Vec *dx, Vec *dh_prev, Vec *dc_prev) {
  const int H = p.HiddenSize();
  Vec dz(4 * H, 0.0);
  Vec dc_total(H);
  for (int k = 0; k < H; ++k) {
    double do_ = dh[k] * cache.tanh_c[k];
    dc_total[k] = dc[k] + dh[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
    double di = dc_total[k] * cache.g[k];
    double df = dc_total[k] * cache.c_prev[k];
    double dg = dc_total[k] * cache.i[k];
    dz[k] = di * cache.i[k] * (1.0 - cache.i[k]);
    dz[H + k] = df * cache.f[k] * (1.0 - cache.f[k]);
    dz[2 * H + k] = dg * (1.0 - cache.g[k] * cache.g[k]);
    dz[3 * H + k] = do_ * cache.o[k] * (1.0 - cache.o[k]);
  }
  if (grad != nullptr) {
    AddOuter(dz, cache.x, &grad->wx);
    AddOuter(dz, cache.h_prev, &grad->wh);
    AddVec(dz, &grad->b);
  }
  if (dx != nullptr) AddMatTVec(p.wx, dz, dx);
  if (dh_prev != nullptr) AddMatTVec(p.wh, dz, dh_prev);
  if (dc_prev != nullptr)
    for (int k = 0; k < H; ++k) (*dc_prev)[k] += dc_total[k] * cache.f[k];
}

Matrix BlstmForward(const BlstmParams &p, const Matrix &seq,
                    BlstmCache *cache) {
  const int T = seq.NumRows();
  const int H = p.HiddenSize();
  if (T < 1) throw DataError("blstm: empty input sequence");
  if (seq.NumCols() != p.fwd.InputSize())
    throw DataError("blstm: feature dim mismatch");

  Matrix out(T, 2 * H);
  if (cache != nullptr) {
    cache->fwd.resize(T);
    cache->bwd.resize(T);
  }

  Vec h(H, 0.0), c(H, 0.0), h2, c2;
  for (int t = 0; t < T; ++t) {
    LstmStep(p.fwd, seq.Row(t), h, c, &h2, &c2,
             cache != nullptr ? &cache->fwd[t] : nullptr);
    h = h2;
    c = c2;
    for (int k = 0; k < H; ++k) out(t, k) = h[k];
  }
  std::fill(h.begin(), h.end(), 0.0);
  std::fill(c.begin(), c.end(), 0.0);
  for (int r = 0; r < T; ++r) {
    int t = T - 1 - r;
    LstmStep(p.bwd, seq.Row(t), h, c, &h2, &c2,
             cache != nullptr ? &cache->bwd[r] : nullptr);
    h = h2;
    c = c2;
    for (int k = 0; k < H; ++k) out(t, H + k) = h[k];
  }
  return out;
}

void BlstmBackward(const BlstmParams &p, const BlstmCache &cache,
                   const Matrix &dout, BlstmParams *grad, Matrix *dseq) {
  const int T = dout.NumRows();
  const int H = p.HiddenSize();

  // Forward direction: run time in reverse, chaining state grads.
  Vec dh(H, 0.0), dc(H, 0.0);
  for (int t = T - 1; t >= 0; --t) {
    for (int k = 0; k < H; ++k) dh[k] += dout(t, k);
    Vec dx(dseq->NumCols(), 0.0), dh_prev(H, 0.0), dc_prev(H, 0.0);
    LstmStepBackward(p.fwd, cache.fwd[t], dh, dc,
                     grad != nullptr ? &grad->fwd : nullptr, &dx, &dh_prev,
                     &dc_prev);
    for (int k = 0; k < dseq->NumCols(); ++k) (*dseq)(t, k) += dx[k];
    dh = dh_prev;
    dc = dc_prev;
  }
  // Backward direction: its "time" axis is reversed input order.
  std::fill(dh.begin(), dh.end(), 0.0);
  std::fill(dc.begin(), dc.end(), 0.0);
  for (int r = T - 1; r >= 0; --r) {
    int t = T - 1 - r;
    for (int k = 0; k < H; ++k) dh[k] += dout(t, H + k);
    Vec dx(dseq->NumCols(), 0.0), dh_prev(H, 0.0), dc_prev(H, 0.0);
    LstmStepBackward(p.bwd, cache.bwd[r], dh, dc,
                     grad != nullptr ? &grad->bwd : nullptr, &dx, &dh_prev,
                     &dc_prev);
    for (int k = 0; k < dseq->NumCols(); ++k) (*dseq)(t, k) += dx[k];
    dh = dh_prev;
    dc = dc_prev;
  }
}

void InitUniform(Matrix *m, Rng *rng, double scale) {
  for (auto &x : m->Data()) x = rng->Uniform(-scale, scale);
}

void InitUniform(Vec *v, Rng *rng, double scale) {
  for (auto &x : *v) x = rng->Uniform(-scale, scale);
}

}  // namespace mdd
