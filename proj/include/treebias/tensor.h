// Copyright (c) 2026 The treebias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TREEBIAS_TENSOR_H_
#define TREEBIAS_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace treebias {

// Dense row-major matrix of doubles. Vectors are 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> values);

  static Tensor Identity(int n);
  static Tensor Row(std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool SameShape(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  std::string ShapeString() const;

  double& operator()(int r, int c) { return data_[Index(r, c)]; }
  double operator()(int r, int c) const { return data_[Index(r, c)]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> row(int r) { return {data_.data() + Index(r, 0), size_t(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + Index(r, 0), size_t(cols_)};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  void Fill(double v);
  bool AllFinite() const;

  bool operator==(const Tensor&) const = default;

 private:
  size_t Index(int r, int c) const { return size_t(r) * size_t(cols_) + size_t(c); }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Compressed sparse row matrix.
class SparseMatrix {
 public:
  struct Triplet {
    int row;
    int col;
    double value;
  };

  SparseMatrix() = default;
  // Duplicate coordinates are summed.
  static SparseMatrix FromTriplets(int rows, int cols, std::vector<Triplet> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  // 0 when (r, c) is not stored.
  double At(int r, int c) const;
  SparseMatrix Transpose() const;
  Tensor ToDense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

}  // namespace treebias

#endif  // TREEBIAS_TENSOR_H_
