// include/mdd/model.h

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

#ifndef MDD_MODEL_H_
#define MDD_MODEL_H_

#include <vector>

#include "mdd/nnet.h"
#include "mdd/phone-set.h"

namespace mdd {

// Architecture hyperparameters. The defaults are desk-scale; the
// production-scale sizes (4 x 320 BLSTM over 80-dim features) are reachable
// through the same fields.
struct ModelConfig {
  int feat_dim = 8;
  int enc_layers = 2;
  int enc_hidden = 32;
  int subsample_factor = 4;  // 1, 2 or 4; frame skipping after layers 1..k
  int dec_hidden = 32;
  int embed_dim = 16;
  int att_dim = 32;
  int att_filters = 10;      // location-feature convolution channels
  int att_kernel = 11;       // location-feature convolution width (odd)

  int EncoderOutDim() const { return 2 * enc_hidden; }
  // Number of halvings applied between encoder layers.
  int NumSubsamples() const {
    switch (subsample_factor) {
      case 1: return 0;
      case 2: return 1;
      case 4: return 2;
      default:
        throw UsageError("subsample_factor must be 1, 2 or 4");
    }
  }
  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};

// Location-aware attention: e_s = v . tanh(W h_dec + V h_enc_s + U f_s + b)
// where f_s are convolved previous attention weights.
struct AttentionParams {
  Matrix w_dec;  // A x Hd
  Matrix w_enc;  // A x De
  Matrix w_loc;  // A x K
  Matrix conv;   // K x kernel
  Vec b;         // A
  Vec v;         // A

  AttentionParams() = default;
  AttentionParams(const ModelConfig &cfg)
      : w_dec(cfg.att_dim, cfg.dec_hidden),
        w_enc(cfg.att_dim, cfg.EncoderOutDim()),
        w_loc(cfg.att_dim, cfg.att_filters),
        conv(cfg.att_filters, cfg.att_kernel),
        b(cfg.att_dim, 0.0),
        v(cfg.att_dim, 0.0) {}
};

struct DecoderParams {
  Matrix embed;       // num_symbols x E (sos row is the start embedding)
  LstmParams cell;    // input cat(embed, context)
  LinParams readout;  // (|U|+1) x (Hd+De); class |U| is eos

  DecoderParams() = default;
  DecoderParams(const ModelConfig &cfg, int num_symbols, int num_phones)
      : embed(num_symbols, cfg.embed_dim),
        cell(cfg.embed_dim + cfg.EncoderOutDim(), cfg.dec_hidden),
        readout(num_phones + 1, cfg.dec_hidden + cfg.EncoderOutDim()) {}
};

struct ModelParams {
  ModelConfig cfg;
  PhoneInventory inv;
  std::vector<BlstmParams> encoder;  // layer 0 consumes features
  AttentionParams att;
  DecoderParams dec;
  LinParams ctc_head;  // (|U|+1) x De; class |U| is blank (blank last)

  ModelParams() = default;
  ModelParams(const ModelConfig &config, const PhoneInventory &inventory);

  // Attention-branch output classes: all of U plus eos.
  int NumAttClasses() const { return inv.NumPhones() + 1; }
  int AttEosClass() const { return inv.NumPhones(); }
  // CTC output classes: all of U plus blank (blank is the last row).
  int NumCtcClasses() const { return inv.NumPhones() + 1; }
  int CtcBlankClass() const { return inv.NumPhones(); }
};

// Fresh parameters, uniform in [-scale, scale] from the seeded generator.
ModelParams InitModel(const ModelConfig &cfg, const PhoneInventory &inv,
                      uint64_t seed, double scale = 0.1);

// Visits every parameter vector in a fixed declared order (encoder layers,
// attention, decoder, CTC head). This single order backs the optimizer,
// serialization, finite-difference checks and transfer copying.
template <typename F>
void VisitLstm(LstmParams &p, F &&f) {
  f(p.wx.Data());
  f(p.wh.Data());
  f(p.b);
}

template <typename F>
void VisitEncoder(ModelParams &m, F &&f) {
  for (auto &layer : m.encoder) {
    VisitLstm(layer.fwd, f);
    VisitLstm(layer.bwd, f);
  }
}

template <typename F>
void VisitParams(ModelParams &m, F &&f) {
  VisitEncoder(m, f);
  f(m.att.w_dec.Data());
  f(m.att.w_enc.Data());
  f(m.att.w_loc.Data());
  f(m.att.conv.Data());
  f(m.att.b);
  f(m.att.v);
  f(m.dec.embed.Data());
  VisitLstm(m.dec.cell, f);
  f(m.dec.readout.w.Data());
  f(m.dec.readout.b);
  f(m.ctc_head.w.Data());
  f(m.ctc_head.b);
}

// Same-shape zeroed gradient container.
ModelParams ZeroLike(const ModelParams &m);

size_t NumParameters(const ModelParams &m);
// Elementwise equality of all parameters (shapes must match).
bool ParamsEqual(const ModelParams &a, const ModelParams &b);

}  // namespace mdd

#endif  // MDD_MODEL_H_
