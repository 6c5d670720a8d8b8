// tests/test-encoder-decoder.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mdd/encoder-decoder.h"
#include "mdd/selftest.h"
#include "mdd/training.h"

using namespace mdd;

namespace {

ModelConfig SmallConfig() {
  ModelConfig cfg;
  cfg.feat_dim = 4;
  cfg.enc_layers = 2;
  cfg.enc_hidden = 3;
  cfg.subsample_factor = 4;
  cfg.dec_hidden = 3;
  cfg.embed_dim = 3;
  cfg.att_dim = 4;
  cfg.att_filters = 2;
  cfg.att_kernel = 3;
  return cfg;
}

ModelParams SmallModel(uint64_t seed, AntiMode mode = AntiMode::kPerPhoneAnti) {
  return InitModel(SmallConfig(), BuildInventory({"a", "b", "c"}, mode), seed);
}

Matrix RandomFeats(int T, int F, uint64_t seed) {
  Rng rng(seed);
  Matrix m(T, F);
  for (double &x : m.Data()) x = rng.Uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("encoder subsampling arithmetic") {
  ModelParams m = SmallModel(1);
  EncoderCache cache;
  CHECK(Encode(m, RandomFeats(100, 4, 2), &cache).NumRows() == 25);
  CHECK(Encode(m, RandomFeats(3, 4, 3), &cache).NumRows() == 1);
  CHECK(Encode(m, RandomFeats(8, 4, 4), &cache).NumCols() ==
        m.cfg.EncoderOutDim());
  CHECK_THROWS_AS(Encode(m, Matrix(0, 4), &cache), DataError);
  CHECK_THROWS_AS(Encode(m, RandomFeats(8, 5, 5), &cache), DataError);
}

TEST_CASE("subsample keeps even rows") {
  Matrix seq(5, 2);
  for (int t = 0; t < 5; ++t) seq.SetRow(t, {double(t), double(t)});
  const Matrix sub = SubsampleRows(seq);
  CHECK(sub.NumRows() == 3);
  CHECK(sub(0, 0) == 0.0);
  CHECK(sub(1, 0) == 2.0);
  CHECK(sub(2, 0) == 4.0);
}

TEST_CASE("attention with equal scores is uniform") {
  ModelParams m = SmallModel(7);
  // Zeroing the score projection makes every e_s identical.
  for (double &x : m.att.v) x = 0.0;
  const int S = 6;
  const Matrix h_enc = RandomFeats(S, m.cfg.EncoderOutDim(), 8);
  Vec h_dec(m.cfg.dec_hidden, 0.3);
  Vec prev(S, 1.0 / S);
  Vec context, align;
  AttendCache cache;
  Attend(m.att, h_dec, prev, h_enc, &context, &align, &cache);
  for (double a : align) CHECK(a == doctest::Approx(1.0 / S).epsilon(1e-12));
  // Uniform weights average the encoder states.
  for (int d = 0; d < m.cfg.EncoderOutDim(); ++d) {
    double mean = 0.0;
    for (int s = 0; s < S; ++s) mean += h_enc(s, d) / S;
    CHECK(context[d] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("attention weights form a simplex") {
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    ModelParams m = SmallModel(rng.NextU64());
    const int S = 1 + rng.UniformInt(8);
    const Matrix h_enc = RandomFeats(S, m.cfg.EncoderOutDim(), rng.NextU64());
    Vec h_dec(m.cfg.dec_hidden);
    for (double &x : h_dec) x = rng.Uniform(-1.0, 1.0);
    Vec raw(S);
    for (double &x : raw) x = rng.Uniform(-2.0, 2.0);
    Vec context, align;
    AttendCache cache;
    Attend(m.att, h_dec, Softmax(raw), h_enc, &context, &align, &cache);
    double sum = 0.0, lo = 1e300, hi = -1e300;
    for (double a : align) {
      CHECK(a >= 0.0);
      sum += a;
    }
    CHECK(std::abs(sum - 1.0) < 1e-6);
    // Context stays in the convex hull of encoder states, per dimension.
    for (int d = 0; d < m.cfg.EncoderOutDim(); ++d) {
      lo = 1e300, hi = -1e300;
      for (int s = 0; s < S; ++s) {
        lo = std::min(lo, h_enc(s, d));
        hi = std::max(hi, h_enc(s, d));
      }
      CHECK(context[d] >= lo - 1e-9);
      CHECK(context[d] <= hi + 1e-9);
    }
  }
}

TEST_CASE("attention step gradient matches finite differences") {
  for (uint64_t seed : {41, 42, 43})
    CHECK(CheckAttendGradient(seed) < kGradTol);
}

TEST_CASE("decoder step emits a normalized distribution, deterministically") {
  ModelParams m = SmallModel(13);
  const Matrix h_enc = RandomFeats(5, m.cfg.EncoderOutDim(), 14);
  const DecoderState s0 = InitDecoderState(m, 5);
  DecoderState s1a, s1b;
  DecoderStepCache ca, cb;
  const Vec lp_a = DecoderStep(m, m.inv.SosId(), s0, h_enc, &s1a, &ca);
  const Vec lp_b = DecoderStep(m, m.inv.SosId(), s0, h_enc, &s1b, &cb);
  CHECK(static_cast<int>(lp_a.size()) == m.NumAttClasses());
  CHECK(lp_a == lp_b);
  CHECK(s1a.h == s1b.h);
  double sum = 0.0;
  for (double lp : lp_a) sum += std::exp(lp);
  CHECK(std::abs(sum - 1.0) < 1e-12);

  CHECK_THROWS_AS(DecoderStep(m, m.inv.BlankId(), s0, h_enc, &s1a, &ca),
                  DataError);
  CHECK_THROWS_AS(DecoderStep(m, m.inv.EosId(), s0, h_enc, &s1a, &ca),
                  DataError);
}

TEST_CASE("attention nll of a uniform readout is (L+1) ln V") {
  ModelParams m = SmallModel(17);
  m.dec.readout.w.SetZero();
  std::fill(m.dec.readout.b.begin(), m.dec.readout.b.end(), 0.0);
  const Matrix h_enc = RandomFeats(4, m.cfg.EncoderOutDim(), 18);
  const std::vector<int> targets = {0, 4, 2};
  const double loss = AttentionNll(m, h_enc, targets, nullptr, nullptr);
  const double expected = 4.0 * std::log(m.NumAttClasses());
  CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("attention nll is nonnegative and rejects bad targets") {
  ModelParams m = SmallModel(19);
  const Matrix h_enc = RandomFeats(4, m.cfg.EncoderOutDim(), 20);
  CHECK(AttentionNll(m, h_enc, {1, 2}, nullptr, nullptr) >= 0.0);
  CHECK_THROWS_AS(AttentionNll(m, h_enc, {}, nullptr, nullptr), DataError);
  CHECK_THROWS_AS(AttentionNll(m, h_enc, {m.inv.BlankId()}, nullptr, nullptr),
                  DataError);
}

TEST_CASE("attention nll gradient matches finite differences") {
  for (uint64_t seed : {51, 52, 53})
    CHECK(CheckAttentionNllGradient(seed) < kGradTol);
}

TEST_CASE("encoder gradient matches finite differences through hybrid loss") {
  // The encoder has no standalone scalar output; the full-model check at
  // lambda = 0 exercises Encode/EncodeBackward through the attention branch.
  CHECK(CheckHybridGradient(61, 0.0) < kGradTol);
}

TEST_CASE("adam on one example drives the attention loss down") {
  ModelParams m = SmallModel(23);
  const Matrix feats = RandomFeats(8, m.cfg.feat_dim, 24);
  const std::vector<int> targets = {0, 2, 4};
  AdamOptimizer opt(m, 1e-2, 5.0);
  double first = 0.0, prev = 0.0;
  int increases = 0;
  for (int step = 0; step < 50; ++step) {
    ModelParams grads = ZeroLike(m);
    EncoderCache ec;
    const Matrix h_enc = Encode(m, feats, &ec);
    Matrix dh_enc(h_enc.NumRows(), h_enc.NumCols());
    const double loss = AttentionNll(m, h_enc, targets, &grads, &dh_enc);
    EncodeBackward(m, ec, dh_enc, &grads, nullptr);
    if (step == 0)
      first = loss;
    else if (loss > prev + 1e-12)
      ++increases;
    prev = loss;
    opt.Step(&m, &grads);
  }
  CHECK(prev < first);
  CHECK(increases <= 5);
}
