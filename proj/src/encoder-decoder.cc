// src/encoder-decoder.cc

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

#include "mdd/encoder-decoder.h"

#include <cmath>

namespace mdd {

Matrix SubsampleRows(const Matrix &seq) {
  int out_rows = (seq.NumRows() + 1) / 2;
  Matrix out(out_rows, seq.NumCols());
  for (int r = 0; r < out_rows; ++r)
    for (int c = 0; c < seq.NumCols(); ++c) out(r, c) = seq(2 * r, c);
  return out;
}

Matrix Encode(const ModelParams &m, const Matrix &feats, EncoderCache *cache) {
  if (feats.NumRows() < 1) throw DataError("encode: empty feature matrix");
  if (feats.NumCols() != m.cfg.feat_dim)
    throw DataError("encode: feature dim " + std::to_string(feats.NumCols()) +
                    " != configured " + std::to_string(m.cfg.feat_dim));
  const int halvings = m.cfg.NumSubsamples();
  if (cache != nullptr) {
    cache->inputs.resize(m.encoder.size());
    cache->layers.resize(m.encoder.size());
  }
  Matrix x = feats;
  for (size_t l = 0; l < m.encoder.size(); ++l) {
    if (cache != nullptr) cache->inputs[l] = x;
    Matrix out = BlstmForward(m.encoder[l], x,
                              cache != nullptr ? &cache->layers[l] : nullptr);
    if (static_cast<int>(l) < halvings) out = SubsampleRows(out);
    x = std::move(out);
  }
  return x;
}

void EncodeBackward(const ModelParams &m, const EncoderCache &cache,
                    const Matrix &dh_enc, ModelParams *grads, Matrix *dfeats) {
  const int halvings = m.cfg.NumSubsamples();
  Matrix d = dh_enc;
  for (int l = static_cast<int>(m.encoder.size()) - 1; l >= 0; --l) {
    const Matrix &input = cache.inputs[l];
    if (l < halvings) {
      // Scatter grads back to the kept (even) frames.
      Matrix up(input.NumRows(), d.NumCols());
      for (int r = 0; r < d.NumRows(); ++r)
        for (int c = 0; c < d.NumCols(); ++c) up(2 * r, c) = d(r, c);
      d = std::move(up);
    }
    Matrix dx(input.NumRows(), input.NumCols());
    BlstmBackward(m.encoder[l], cache.layers[l], d,
                  grads != nullptr ? &grads->encoder[l] : nullptr, &dx);
    d = std::move(dx);
  }
  if (dfeats != nullptr)
    for (int r = 0; r < d.NumRows(); ++r)
      for (int c = 0; c < d.NumCols(); ++c) (*dfeats)(r, c) += d(r, c);
}

void Attend(const AttentionParams &p, const Vec &h_dec, const Vec &prev_align,
            const Matrix &h_enc, Vec *context, Vec *align, AttendCache *cache) {
  const int S = h_enc.NumRows();
  const int A = static_cast<int>(p.b.size());
  const int K = p.conv.NumRows();
  const int kernel = p.conv.NumCols();
  const int pad = (kernel - 1) / 2;
  if (static_cast<int>(prev_align.size()) != S)
    throw DataError("attend: previous attention weight length mismatch");
  if (static_cast<int>(h_dec.size()) != p.w_dec.NumCols())
    throw DataError("attend: decoder state size mismatch");
  if (h_enc.NumCols() != p.w_enc.NumCols())
    throw DataError("attend: encoder state size mismatch");

  // Location features: 1-D convolution of the previous attention weights.
  Matrix loc(S, K);
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < K; ++k) {
      double acc = 0.0;
      for (int j = 0; j < kernel; ++j) {
        int idx = s + j - pad;
        if (idx >= 0 && idx < S) acc += p.conv(k, j) * prev_align[idx];
      }
      loc(s, k) = acc;
    }
  }

  Vec wh = MatVec(p.w_dec, h_dec);
  Matrix tanh_u(S, A);
  Vec scores(S);
  for (int s = 0; s < S; ++s) {
    Vec u = p.b;
    AddVec(wh, &u);
    AddMatVec(p.w_enc, h_enc.Row(s), &u);
    AddMatVec(p.w_loc, loc.Row(s), &u);
    double e = 0.0;
    for (int a = 0; a < A; ++a) {
      double t = std::tanh(u[a]);
      tanh_u(s, a) = t;
      e += p.v[a] * t;
    }
    scores[s] = e;
  }
  *align = Softmax(scores);
  context->assign(h_enc.NumCols(), 0.0);
  for (int s = 0; s < S; ++s)
    for (int c = 0; c < h_enc.NumCols(); ++c)
      (*context)[c] += (*align)[s] * h_enc(s, c);

  if (cache != nullptr) {
    cache->h_dec = h_dec;
    cache->prev_align = prev_align;
    cache->loc_feat = std::move(loc);
    cache->tanh_u = std::move(tanh_u);
    cache->align = *align;
  }
}

void AttendBackward(const AttentionParams &p, const Matrix &h_enc,
                    const AttendCache &cache, const Vec &dcontext,
                    const Vec &dalign_ext, AttentionParams *grad, Vec *dh_dec,
                    Vec *dprev_align, Matrix *dh_enc) {
  const int S = h_enc.NumRows();
  const int A = static_cast<int>(p.b.size());
  const int K = p.conv.NumRows();
  const int kernel = p.conv.NumCols();
  const int pad = (kernel - 1) / 2;
  const Vec &align = cache.align;

  // context = sum_s a_s h_s
  Vec dalign(S, 0.0);
  for (int s = 0; s < S; ++s) {
    dalign[s] = dalign_ext.empty() ? 0.0 : dalign_ext[s];
    dalign[s] += Dot(dcontext, h_enc.Row(s));
    if (dh_enc != nullptr)
      for (int c = 0; c < h_enc.NumCols(); ++c)
        (*dh_enc)(s, c) += align[s] * dcontext[c];
  }

  Vec dscores(S, 0.0);
  SoftmaxBackward(align, dalign, &dscores);

  Vec dwh(A, 0.0);  // accumulated du over s, for the shared W h_dec term
  for (int s = 0; s < S; ++s) {
    if (dscores[s] == 0.0) continue;
    Vec du(A);
    for (int a = 0; a < A; ++a) {
      double t = cache.tanh_u(s, a);
      if (grad != nullptr) grad->v[a] += dscores[s] * t;
      du[a] = dscores[s] * p.v[a] * (1.0 - t * t);
    }
    AddVec(du, &dwh);
    if (grad != nullptr) {
      AddOuter(du, h_enc.Row(s), &grad->w_enc);
      AddOuter(du, cache.loc_feat.Row(s), &grad->w_loc);
      AddVec(du, &grad->b);
    }
    if (dh_enc != nullptr)
      for (int c = 0; c < h_enc.NumCols(); ++c)
        for (int a = 0; a < A; ++a)
          (*dh_enc)(s, c) += p.w_enc(a, c) * du[a];
    // Through the location features into the convolution and prev_align.
    Vec dloc(K, 0.0);
    AddMatTVec(p.w_loc, du, &dloc);
    for (int k = 0; k < K; ++k) {
      if (dloc[k] == 0.0) continue;
      for (int j = 0; j < kernel; ++j) {
        int idx = s + j - pad;
        if (idx < 0 || idx >= S) continue;
        if (grad != nullptr) grad->conv(k, j) += dloc[k] * cache.prev_align[idx];
        if (dprev_align != nullptr)
          (*dprev_align)[idx] += dloc[k] * p.conv(k, j);
      }
    }
  }
  if (grad != nullptr) AddOuter(dwh, cache.h_dec, &grad->w_dec);
  if (dh_dec != nullptr) AddMatTVec(p.w_dec, dwh, dh_dec);
}

DecoderState InitDecoderState(const ModelParams &m, int num_enc_frames) {
  if (num_enc_frames < 1)
    throw DataError("decoder: empty encoder output");
  DecoderState st;
  st.h.assign(m.cfg.dec_hidden, 0.0);
  st.c.assign(m.cfg.dec_hidden, 0.0);
  st.align.assign(num_enc_frames, 1.0 / num_enc_frames);
  return st;
}

Vec DecoderStep(const ModelParams &m, int y_prev, const DecoderState &state,
                const Matrix &h_enc, DecoderState *next,
                DecoderStepCache *cache) {
  const int num_phones = m.inv.NumPhones();
  if (y_prev != m.inv.SosId() && (y_prev < 0 || y_prev >= num_phones))
    throw DataError("decoder_step: invalid previous symbol id " +
                    std::to_string(y_prev));

  Vec context, align;
  Attend(m.att, state.h, state.align, h_enc, &context, &align,
         cache != nullptr ? &cache->att : nullptr);

  Vec x = Concat(m.dec.embed.Row(y_prev), context);
  Vec h_new, c_new;
  LstmStep(m.dec.cell, x, state.h, state.c, &h_new, &c_new,
           cache != nullptr ? &cache->lstm : nullptr);

  Vec readout_in = Concat(h_new, context);
  Vec log_probs = LogSoftmax(Linb(m.dec.readout, readout_in));

  if (next != nullptr) {
    next->h = h_new;
    next->c = c_new;
    next->align = align;
  }
  if (cache != nullptr) {
    cache->y_prev = y_prev;
    cache->context = std::move(context);
    cache->readout_in = std::move(readout_in);
    cache->log_probs = log_probs;
  }
  return log_probs;
}

double AttentionNll(const ModelParams &m, const Matrix &h_enc,
                    const std::vector<int> &target_ids, ModelParams *grads,
                    Matrix *dh_enc, double grad_scale) {
  if (target_ids.empty())
    throw DataError("attention_nll: empty target sequence");
  for (int id : target_ids)
    if (id < 0 || id >= m.inv.NumPhones())
      throw DataError("attention_nll: target id " + std::to_string(id) +
                      " outside the phone vocabulary");

  const int L = static_cast<int>(target_ids.size());
  const int steps = L + 1;  // targets plus eos
  const int S = h_enc.NumRows();
  const int De = h_enc.NumCols();
  const int Hd = m.cfg.dec_hidden;
  const int E = m.cfg.embed_dim;

  std::vector<DecoderStepCache> caches(grads != nullptr ? steps : 1);
  std::vector<DecoderState> states(grads != nullptr ? steps : 1);

  double loss = 0.0;
  DecoderState state = InitDecoderState(m, S);
  for (int l = 0; l < steps; ++l) {
    int y_prev = (l == 0) ? m.inv.SosId() : target_ids[l - 1];
    int slot = grads != nullptr ? l : 0;
    states[slot] = state;
    DecoderState next;
    Vec log_probs =
        DecoderStep(m, y_prev, state, h_enc, &next, &caches[slot]);
    int cls = (l == L) ? m.AttEosClass() : target_ids[l];
    loss -= log_probs[cls];
    state = std::move(next);
  }

  if (grads == nullptr) return loss;

  // Backward, chaining state grads across steps in reverse.
  Vec dh_next(Hd, 0.0), dc_next(Hd, 0.0), dalign_next(S, 0.0);
  for (int l = steps - 1; l >= 0; --l) {
    const DecoderStepCache &cc = caches[l];
    int cls = (l == L) ? m.AttEosClass() : target_ids[l];

    Vec dlogp(cc.log_probs.size(), 0.0);
    dlogp[cls] = -grad_scale;
    Vec dlogits(cc.log_probs.size(), 0.0);
    LogSoftmaxBackward(cc.log_probs, dlogp, &dlogits);
    Vec dreadout_in(Hd + De, 0.0);
    LinbBackward(m.dec.readout, cc.readout_in, dlogits, &grads->dec.readout,
                 &dreadout_in);

    Vec dh(dh_next);
    for (int k = 0; k < Hd; ++k) dh[k] += dreadout_in[k];
    Vec dcontext(De, 0.0);
    for (int k = 0; k < De; ++k) dcontext[k] += dreadout_in[Hd + k];

    Vec dx(E + De, 0.0), dh_prev(Hd, 0.0), dc_prev(Hd, 0.0);
    LstmStepBackward(m.dec.cell, cc.lstm, dh, dc_next, &grads->dec.cell, &dx,
                     &dh_prev, &dc_prev);
    for (int k = 0; k < E; ++k)
      grads->dec.embed(cc.y_prev, k) += dx[k];
    for (int k = 0; k < De; ++k) dcontext[k] += dx[E + k];

    Vec dh_dec(Hd, 0.0), dprev_align(S, 0.0);
    AttendBackward(m.att, h_enc, cc.att, dcontext, dalign_next, &grads->att,
                   &dh_dec, &dprev_align, dh_enc);

    AddVec(dh_dec, &dh_prev);
    dh_next = std::move(dh_prev);
    dc_next = std::move(dc_prev);
    dalign_next = std::move(dprev_align);
    // The initial state (zeros, uniform align) is constant: grads stop here.
  }
  return loss;
}

}  // namespace mdd
