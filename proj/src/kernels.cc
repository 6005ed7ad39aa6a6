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

#include <atomic>

#include "treebias/kernels.h"

namespace treebias::kernels {

namespace {
std::atomic<Backend> g_backend{
#ifdef TREEBIAS_HAVE_OPENMP
    Backend::kOpenMP
#else
    Backend::kSerial
#endif
};
}  // namespace

bool OpenMPAvailable() {
#ifdef TREEBIAS_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

void SetBackend(Backend backend) {
  g_backend = OpenMPAvailable() ? backend : Backend::kSerial;
}

Backend GetBackend() { return g_backend; }

void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  if (g_backend == Backend::kOpenMP) return omp::MatMul(a, b, out, accumulate);
  serial::MatMul(a, b, out, accumulate);
}

void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  if (g_backend == Backend::kOpenMP) return omp::MatMulBT(a, b, out, accumulate);
  serial::MatMulBT(a, b, out, accumulate);
}

void MatMulAT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate) {
  if (g_backend == Backend::kOpenMP) return omp::MatMulAT(a, b, out, accumulate);
  serial::MatMulAT(a, b, out, accumulate);
}

void SpMM(const SparseMatrix& p, const Tensor& h, Tensor* out, bool accumulate) {
  if (g_backend == Backend::kOpenMP) return omp::SpMM(p, h, out, accumulate);
  serial::SpMM(p, h, out, accumulate);
}

}  // namespace treebias::kernels
