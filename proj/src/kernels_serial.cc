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

#include "treebias/errors.h"
#include "treebias/kernels.h"

namespace treebias::kernels {

void CheckMatMul(const Tensor& a, const Tensor& b, const Tensor& out, char kind) {
  int m = 0, k1 = 0, k2 = 0, n = 0;
  switch (kind) {
    case 'N': m = a.rows(); k1 = a.cols(); k2 = b.rows(); n = b.cols(); break;
    case 'T': m = a.rows(); k1 = a.cols(); k2 = b.cols(); n = b.rows(); break;
    case 'A': m = a.cols(); k1 = a.rows(); k2 = b.rows(); n = b.cols(); break;
    default: throw DomainError("unknown product kind");
  }
  if (k1 != k2 || out.rows() != m || out.cols() != n) {
    throw DomainError(std::string("matmul shape mismatch (") + kind + "): " +
                      a.ShapeString() + " x " + b.ShapeString() + " -> " +
                      out.ShapeString());
  }
}

void CheckSpMM(const SparseMatrix& p, const Tensor& h, const Tensor& out) {
  if (p.cols() != h.rows() || out.rows() != p.rows() || out.cols() != h.cols()) {
    throw DomainError("spmm shape mismatch");
  }
}

namespace serial {

void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  CheckMatMul(a, b, *out, 'N');
  if (!accumulate) out->Fill(0.0);
  const int m = a.rows(), k = a.cols(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    auto orow = out->row(i);
    for (int p = 0; p < k; ++p) {
      const double av = a(i, p);
      auto brow = b.row(p);
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  CheckMatMul(a, b, *out, 'T');
  const int m = a.rows(), k = a.cols(), n = b.rows();
  for (int i = 0; i < m; ++i) {
    auto arow = a.row(i);
    for (int j = 0; j < n; ++j) {
      auto brow = b.row(j);
      double s = accumulate ? (*out)(i, j) : 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      (*out)(i, j) = s;
    }
  }
}

void MatMulAT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  CheckMatMul(a, b, *out, 'A');
  if (!accumulate) out->Fill(0.0);
  const int m = a.cols(), k = a.rows(), n = b.cols();
  for (int i = 0; i < m; ++i) {
    auto orow = out->row(i);
    for (int p = 0; p < k; ++p) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      auto brow = b.row(p);
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

void SpMM(const SparseMatrix& p, const Tensor& h, Tensor* out, bool accumulate) {
  CheckSpMM(p, h, *out);
  if (!accumulate) out->Fill(0.0);
  const auto rp = p.row_ptr();
  const auto ci = p.col_idx();
  const auto v = p.values();
  for (int i = 0; i < p.rows(); ++i) {
    auto orow = out->row(i);
    for (int q = rp[i]; q < rp[i + 1]; ++q) {
      auto hrow = h.row(ci[q]);
      for (int j = 0; j < h.cols(); ++j) orow[j] += v[q] * hrow[j];
    }
  }
}

}  // namespace serial
}  // namespace treebias::kernels
