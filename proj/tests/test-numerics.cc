// tests/test-numerics.cc

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

#include "mdd/nnet.h"
#include "mdd/selftest.h"

using namespace mdd;

TEST_CASE("linb identity and constant maps") {
  LinParams id(2, 2);
  id.w(0, 0) = 1.0;
  id.w(1, 1) = 1.0;
  CHECK(Linb(id, {1.0, 2.0}) == Vec{1.0, 2.0});

  LinParams constant(2, 3);
  constant.b = {3.0, 3.0};
  CHECK(Linb(constant, {5.0, -1.0, 0.25}) == Vec{3.0, 3.0});

  CHECK_THROWS_AS(Linb(id, {1.0, 2.0, 3.0}), DataError);
}

TEST_CASE("linb gradient matches finite differences") {
  for (uint64_t seed : {1, 2, 3, 4, 5})
    CHECK(CheckLinbGradient(seed) < kGradTol);
}

TEST_CASE("softmax basics") {
  const Vec u = Softmax({0.0, 0.0, 0.0});
  for (double x : u) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const Vec dom = Softmax({1.0, 1.0 + 40.0});
  CHECK(dom[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dom[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(Softmax({}), DataError);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(99);
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + rng.UniformInt(8);
    Vec v(n), shifted(n);
    const double c = rng.Uniform(-50.0, 50.0);
    for (int i = 0; i < n; ++i) {
      v[i] = rng.Uniform(-10.0, 10.0);
      shifted[i] = v[i] + c;
    }
    const Vec a = Softmax(v), b = Softmax(shifted);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(a[i] >= 0.0);
      CHECK(std::abs(a[i] - b[i]) < 1e-12);
      sum += a[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("log softmax agrees with softmax") {
  Rng rng(7);
  Vec v(5);
  for (double &x : v) x = rng.Uniform(-3.0, 3.0);
  const Vec p = Softmax(v), lp = LogSoftmax(v);
  for (int i = 0; i < 5; ++i)
    CHECK(std::exp(lp[i]) == doctest::Approx(p[i]).epsilon(1e-12));
}

TEST_CASE("lstm step at the origin and output bounds") {
  const int X = 3, H = 4;
  LstmParams zero(X, H);
  Vec h, c;
  LstmCache cache;
  LstmStep(zero, Vec(X, 0.0), Vec(H, 0.0), Vec(H, 0.0), &h, &c, &cache);
  for (double x : h) CHECK(x == 0.0);

  Rng rng(3);
  LstmParams p(X, H);
  InitUniform(&p.wx, &rng, 2.0);
  InitUniform(&p.wh, &rng, 2.0);
  InitUniform(&p.b, &rng, 2.0);
  Vec x(X), hp(H), cp(H);
  for (double &v : x) v = rng.Uniform(-5.0, 5.0);
  for (double &v : hp) v = rng.Uniform(-1.0, 1.0);
  for (double &v : cp) v = rng.Uniform(-3.0, 3.0);
  LstmStep(p, x, hp, cp, &h, &c, &cache);
  for (double v : h) CHECK(std::abs(v) < 1.0);

  CHECK_THROWS_AS(LstmStep(p, Vec(X + 1, 0.0), hp, cp, &h, &c, &cache),
                  DataError);
}

TEST_CASE("lstm step gradient matches finite differences") {
  for (uint64_t seed : {10, 11, 12})
    CHECK(CheckLstmStepGradient(seed) < kGradTol);
}

TEST_CASE("blstm layer shape and reversal symmetry") {
  Rng rng(21);
  const int T = 4, F = 3, H = 2;
  BlstmParams p(F, H);
  InitUniform(&p.fwd.wx, &rng);
  InitUniform(&p.fwd.wh, &rng);
  InitUniform(&p.fwd.b, &rng);
  p.bwd = p.fwd;  // symmetric directions make the reversal check exact
  Matrix seq(T, F);
  InitUniform(&seq, &rng, 1.0);

  BlstmCache cache;
  const Matrix out = BlstmForward(p, seq, &cache);
  CHECK(out.NumRows() == T);
  CHECK(out.NumCols() == 2 * H);

  Matrix single(1, F);
  single.SetRow(0, seq.Row(0));
  BlstmCache c1;
  CHECK(BlstmForward(p, single, &c1).NumCols() == 2 * H);

  Matrix rev(T, F);
  for (int t = 0; t < T; ++t) rev.SetRow(t, seq.Row(T - 1 - t));
  BlstmCache c2;
  const Matrix out_rev = BlstmForward(p, rev, &c2);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < H; ++j) {
      CHECK(out_rev(t, j) ==
            doctest::Approx(out(T - 1 - t, H + j)).epsilon(1e-12));
      CHECK(out_rev(t, H + j) ==
            doctest::Approx(out(T - 1 - t, j)).epsilon(1e-12));
    }
}

TEST_CASE("blstm gradient matches finite differences") {
  for (uint64_t seed : {31, 32, 33})
    CHECK(CheckBlstmGradient(seed) < kGradTol);
}

TEST_CASE("finite-difference helper is sane") {
  double x = 2.0;
  auto f = [&x]() { return x * x * x; };
  CHECK(CentralDiff(f, &x, 1e-5) == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(x == 2.0);
}
