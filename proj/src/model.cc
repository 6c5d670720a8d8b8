// src/model.cc

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

#include "mdd/model.h"

namespace mdd {

void ModelConfig::Validate() const {
  MDD_REQUIRE(feat_dim >= 1, "feat_dim must be >= 1");
  MDD_REQUIRE(enc_layers >= 1, "enc_layers must be >= 1");
  MDD_REQUIRE(enc_hidden >= 1, "enc_hidden must be >= 1");
  MDD_REQUIRE(dec_hidden >= 1, "dec_hidden must be >= 1");
  MDD_REQUIRE(embed_dim >= 1, "embed_dim must be >= 1");
  MDD_REQUIRE(att_dim >= 1, "att_dim must be >= 1");
  MDD_REQUIRE(att_filters >= 1, "att_filters must be >= 1");
  MDD_REQUIRE(att_kernel >= 1 && att_kernel % 2 == 1,
              "att_kernel must be odd and >= 1");
  (void)NumSubsamples();  // throws on invalid factor
}

ModelParams::ModelParams(const ModelConfig &config,
                         const PhoneInventory &inventory)
    : cfg(config),
      inv(inventory),
      att(config),
      dec(config, inventory.NumSymbols(), inventory.NumPhones()),
      ctc_head(inventory.NumPhones() + 1, config.EncoderOutDim()) {
  cfg.Validate();
  encoder.reserve(cfg.enc_layers);
  for (int l = 0; l < cfg.enc_layers; ++l) {
    int in_dim = (l == 0) ? cfg.feat_dim : cfg.EncoderOutDim();
    encoder.emplace_back(in_dim, cfg.enc_hidden);
  }
}

ModelParams InitModel(const ModelConfig &cfg, const PhoneInventory &inv,
                      uint64_t seed, double scale) {
  ModelParams m(cfg, inv);
  Rng rng(seed);
  VisitParams(m, [&](Vec &v) { InitUniform(&v, &rng, scale); });
  return m;
}

ModelParams ZeroLike(const ModelParams &m) {
  ModelParams z(m.cfg, m.inv);
  VisitParams(z, [](Vec &v) { std::fill(v.begin(), v.end(), 0.0); });
  return z;
}

size_t NumParameters(const ModelParams &m) {
  size_t n = 0;
  VisitParams(const_cast<ModelParams &>(m),
              [&](Vec &v) { n += v.size(); });
  return n;
}

bool ParamsEqual(const ModelParams &a, const ModelParams &b) {
  std::vector<const Vec *> va, vb;
  VisitParams(const_cast<ModelParams &>(a),
              [&](Vec &v) { va.push_back(&v); });
  VisitParams(const_cast<ModelParams &>(b),
              [&](Vec &v) { vb.push_back(&v); });
  if (va.size() != vb.size()) return false;
  for (size_t i = 0; i < va.size(); ++i)
    if (*va[i] != *vb[i]) return false;
  return true;
}

}  // namespace mdd
