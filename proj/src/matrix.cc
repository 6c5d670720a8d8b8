// src/matrix.cc

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

#include "mdd/matrix.h"

#include <cmath>

namespace mdd {

Vec MatVec(const Matrix &w, const Vec &x) {
  Vec y(w.NumRows(), 0.0);
  AddMatVec(w, x, &y);
  return y;
}

void AddMatVec(const Matrix &w, const Vec &x, Vec *y) {
  assert(static_cast<int>(x.size()) == w.NumCols());
  assert(static_cast<int>(y->size()) == w.NumRows());
  const int rows = w.NumRows(), cols = w.NumCols();
  for (int r = 0; r < rows; ++r) {
    const double *row = w.RowData(r);
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    (*y)[r] += acc;
  }
}

void AddMatTVec(const Matrix &w, const Vec &dy, Vec *dx) {
  assert(static_cast<int>(dy.size()) == w.NumRows());
  assert(static_cast<int>(dx->size()) == w.NumCols());
  const int rows = w.NumRows(), cols = w.NumCols();
  for (int r = 0; r < rows; ++r) {
    const double *row = w.RowData(r);
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < cols; ++c) (*dx)[c] += row[c] * g;
  }
}

void AddOuter(const Vec &dy, const Vec &x, Matrix *dw) {
  assert(static_cast<int>(dy.size()) == dw->NumRows());
  assert(static_cast<int>(x.size()) == dw->NumCols());
  const int rows = dw->NumRows(), cols = dw->NumCols();
  for (int r = 0; r < rows; ++r) {
    double *row = dw->RowData(r);
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < cols; ++c) row[c] += g * x[c];
  }
}

void AddVec(const Vec &src, Vec *dst, double scale) {
  assert(src.size() == dst->size());
  for (size_t i = 0; i < src.size(); ++i) (*dst)[i] += scale * src[i];
}

double Dot(const Vec &a, const Vec &b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vec Concat(const Vec &a, const Vec &b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool AllFinite(const Vec &v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool AllFinite(const Matrix &m) { return AllFinite(m.Data()); }

}  // namespace mdd
