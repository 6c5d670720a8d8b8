// include/mdd/matrix.h

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

#ifndef MDD_MATRIX_H_
#define MDD_MATRIX_H_

#include <cassert>
#include <vector>

#include "mdd/common.h"

namespace mdd {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. All model math at desk scale is done
// in 64-bit so that oracle tolerances (1e-10 on CTC, 1e-4 relative on
// gradients) are attainable.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double value = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * cols, value) {
    assert(rows >= 0 && cols >= 0);
  }

  int NumRows() const { return rows_; }
  int NumCols() const { return cols_; }
  size_t Size() const { return data_.size(); }

  double &operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  double *RowData(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double *RowData(int r) const {
    return data_.data() + static_cast<size_t>(r) * cols_;
  }

  Vec Row(int r) const {
    return Vec(RowData(r), RowData(r) + cols_);
  }
  void SetRow(int r, const Vec &v) {
    assert(static_cast<int>(v.size()) == cols_);
    std::copy(v.begin(), v.end(), RowData(r));
  }

  std::vector<double> &Data() { return data_; }
  const std::vector<double> &Data() const { return data_; }

  void SetZero() { std::fill(data_.begin(), data_.end(), 0.0); }

  bool operator==(const Matrix &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

// y = W x
Vec MatVec(const Matrix &w, const Vec &x);
// y += W x
void AddMatVec(const Matrix &w, const Vec &x, Vec *y);
// dx += W^T dy
void AddMatTVec(const Matrix &w, const Vec &dy, Vec *dx);
// dW += dy x^T
void AddOuter(const Vec &dy, const Vec &x, Matrix *dw);

void AddVec(const Vec &src, Vec *dst, double scale = 1.0);
double Dot(const Vec &a, const Vec &b);
Vec Concat(const Vec &a, const Vec &b);

bool AllFinite(const Vec &v);
bool AllFinite(const Matrix &m);

}  // namespace mdd

#endif  // MDD_MATRIX_H_
