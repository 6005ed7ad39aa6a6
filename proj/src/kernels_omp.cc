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

#include "treebias/kernels.h"

#ifdef TREEBIAS_HAVE_OPENMP
#include <omp.h>
#endif

namespace treebias::kernels::omp {

namespace {
// Below this many multiply-adds the fork/join costs more than it saves.
constexpr long kParallelWork = 1L << 15;
}  // namespace

void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  CheckMatMul(a, b, *out, 'N');
  if (!accumulate) out->Fill(0.0);
  const int m = a.rows(), k = a.cols(), n = b.cols();
  const long work = long(m) * k * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < m; ++i) {
    double* orow = out->row(i).data();
    for (int p = 0; p < k; ++p) {
      const double av = a(i, p);
      const double* brow = b.row(p).data();
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  CheckMatMul(a, b, *out, 'T');
  const int m = a.rows(), k = a.cols(), n = b.rows();
  const long work = long(m) * k * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < m; ++i) {
    const double* arow = a.row(i).data();
    for (int j = 0; j < n; ++j) {
      const double* brow = b.row(j).data();
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
  const long work = long(m) * k * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < m; ++i) {
    double* orow = out->row(i).data();
    for (int p = 0; p < k; ++p) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      const double* brow = b.row(p).data();
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
  const int n = h.cols();
  const long work = long(p.nnz()) * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < p.rows(); ++i) {
    double* orow = out->row(i).data();
    for (int q = rp[i]; q < rp[i + 1]; ++q) {
      const double* hrow = h.row(ci[q]).data();
      for (int j = 0; j < n; ++j) orow[j] += v[q] * hrow[j];
    }
  }
}

}  // namespace treebias::kernels::omp
