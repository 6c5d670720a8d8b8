// include/mdd/nnet.h

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

// Differentiable primitives with hand-derived gradients: linear map,
// (log-)softmax, LSTM cell, bidirectional LSTM layer. Everything is
// plain-double forward caches plus explicit backward functions; there is
// no autodiff graph.

#ifndef MDD_NNET_H_
#define MDD_NNET_H_

#include <vector>

#include "mdd/matrix.h"
#include "mdd/rng.h"

namespace mdd {

// y = W x + b
struct LinParams {
  Matrix w;
  Vec b;

  LinParams() = default;
  LinParams(int out_dim, int in_dim) : w(out_dim, in_dim), b(out_dim, 0.0) {}
  int OutDim() const { return w.NumRows(); }
  int InDim() const { return w.NumCols(); }
};

Vec Linb(const LinParams &p, const Vec &x);
// Accumulates into *grad and *dx (dx may be null).
void LinbBackward(const LinParams &p, const Vec &x, const Vec &dy,
                  LinParams *grad, Vec *dx);

// Numerically stable (max-subtracted). Rejects empty input.
Vec Softmax(const Vec &v);
Vec LogSoftmax(const Vec &v);
// dv += J_softmax^T dy given the forward output y.
void SoftmaxBackward(const Vec &y, const Vec &dy, Vec *dv);
// dv for z = log_softmax(v): dv += dz - softmax(v) * sum(dz).
void LogSoftmaxBackward(const Vec &log_y, const Vec &dz, Vec *dv);

// Four-gate LSTM cell, gate order (input, forget, cell, output) stacked in
// the leading dimension of wx / wh / b.
struct LstmParams {
  Matrix wx;  // 4H x X
  Matrix wh;  // 4H x H
  Vec b;      // 4H

  LstmParams() = default;
  LstmParams(int input_size, int hidden_size)
      : wx(4 * hidden_size, input_size),
        wh(4 * hidden_size, hidden_size),
        b(4 * hidden_size, 0.0) {}
  int InputSize() const { return wx.NumCols(); }
  int HiddenSize() const { return wh.NumCols(); }
};

struct LstmCache {
  Vec x, h_prev, c_prev;
  Vec i, f, g, o;  // post-activation gates
  Vec c, h, tanh_c;
};

// (h', c') = step; fills *cache for the backward pass.
void LstmStep(const LstmParams &p, const Vec &x, const Vec &h_prev,
              const Vec &c_prev, Vec *h_out, Vec *c_out, LstmCache *cache);

// Accumulates parameter grads into *grad and input-side grads into
// dx/dh_prev/dc_prev (any may be null).
void LstmStepBackward(const LstmParams &p, const LstmCache &cache,
                      const Vec &dh, const Vec &dc, LstmParams *grad,
                      Vec *dx, Vec *dh_prev, Vec *dc_prev);

struct BlstmParams {
  LstmParams fwd, bwd;

  BlstmParams() = default;
  BlstmParams(int input_size, int hidden_size)
      : fwd(input_size, hidden_size), bwd(input_size, hidden_size) {}
  int HiddenSize() const { return fwd.HiddenSize(); }
};

struct BlstmCache {
  std::vector<LstmCache> fwd, bwd;  // bwd indexed in reversed time
};

// seq: T x F -> T x 2H (forward pass concatenated with backward pass).
Matrix BlstmForward(const BlstmParams &p, const Matrix &seq,
                    BlstmCache *cache);
// dseq must be T x F zero-initialized by the caller (accumulated into).
void BlstmBackward(const BlstmParams &p, const BlstmCache &cache,
                   const Matrix &dout, BlstmParams *grad, Matrix *dseq);

void InitUniform(Matrix *m, Rng *rng, double scale = 0.1);
void InitUniform(Vec *v, Rng *rng, double scale = 0.1);

}  // namespace mdd

#endif  // MDD_NNET_H_
