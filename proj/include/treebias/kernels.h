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

#ifndef TREEBIAS_KERNELS_H_
#define TREEBIAS_KERNELS_H_

#include "treebias/tensor.h"

// Dense and sparse products used by the tape. Two implementations exist:
// a serial reference and an OpenMP version that splits output rows across
// threads. Both accumulate every output element in the same order, so
// their results are bit-identical.
namespace treebias::kernels {

enum class Backend { kSerial, kOpenMP };

void SetBackend(Backend backend);
Backend GetBackend();
bool OpenMPAvailable();

// out = a * b (out += a * b when accumulate).
void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate = false);
// out = a * b^T
void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate = false);
// out = a^T * b
void MatMulAT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate = false);
// out = p * h
void SpMM(const SparseMatrix& p, const Tensor& h, Tensor* out, bool accumulate = false);

namespace serial {
void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void MatMulAT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void SpMM(const SparseMatrix& p, const Tensor& h, Tensor* out, bool accumulate);
}  // namespace serial

namespace omp {
void MatMul(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void MatMulBT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void MatMulAT(const Tensor& a, const Tensor& b, Tensor* out, bool accumulate);
void SpMM(const SparseMatrix& p, const Tensor& h, Tensor* out, bool accumulate);
}  // namespace omp

// Shape validation shared by both backends; throws DomainError.
void CheckMatMul(const Tensor& a, const Tensor& b, const Tensor& out, char kind);
void CheckSpMM(const SparseMatrix& p, const Tensor& h, const Tensor& out);

}  // namespace treebias::kernels

#endif  // TREEBIAS_KERNELS_H_
