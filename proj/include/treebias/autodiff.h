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

#ifndef TREEBIAS_AUTODIFF_H_
#define TREEBIAS_AUTODIFF_H_

#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "treebias/param_store.h"
#include "treebias/tensor.h"

namespace treebias {

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  // Convenience for 1x1 values.
  double scalar() const;
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Records a computation so that Backward() can visit it in reverse. A tape
// constructed with record=false evaluates values only.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  size_t size() const { return nodes_.size(); }

  Var Constant(Tensor value);
  // Leaf bound to a stored parameter. Frozen parameters behave as
  // constants. Repeated calls with the same name return the same leaf.
  Var Param(ParamStore& store, const std::string& name);

  // Appends an op result. fn is kept only if some input needs a gradient.
  Var Record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn fn);

  const Tensor& value(int id) const { return nodes_.at(id).value; }
  bool RequiresGrad(const Var& v) const { return nodes_.at(v.id()).requires_grad; }
  // Gradient buffer for a node, allocated on first use.
  Tensor& GradOf(const Var& v);

  // Reverse pass from a 1x1 loss. Parameter gradients are added into the
  // store's grad buffers; the tape is cleared afterwards.
  void Backward(const Var& loss);
  void Clear();

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    ParamStore::Entry* param = nullptr;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<const ParamStore::Entry*, int> param_ids_;
};

namespace ad {

Var MatMul(const Var& a, const Var& b);
// a * b^T
Var MatMulBT(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
// Adds a 1 x n row to every row of a.
Var AddRow(const Var& a, const Var& row);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double c);
// Multiplies every entry of a by the 1x1 value s.
Var ScaleBy(const Var& a, const Var& s);
Var AddScalar(const Var& a, double c);
Var Relu(const Var& a);
Var Sigmoid(const Var& a);
Var Tanh(const Var& a);
Var Log(const Var& a);
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var GatherRows(const Var& a, std::vector<int> rows);
// Output row i is the element-wise max of a's rows listed in segments[i];
// an empty segment gives zeros. Gradients go to the first maximal row.
Var SegmentMax(const Var& a, std::vector<std::vector<int>> segments);
Var LayerNorm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
// Row-wise softmax.
Var Softmax(const Var& a);
// Softmax over a single row with masked entries forced to probability 0.
// Throws DomainError when no entry is unmasked.
Var MaskedSoftmax(const Var& logits, const std::vector<bool>& mask);
// Constant sparse operator with its transpose, shared by the ops using it.
struct SparseOperator {
  SparseMatrix forward;
  SparseMatrix transpose;
};
std::shared_ptr<const SparseOperator> MakeSparseOperator(SparseMatrix p);

// p * h for a constant sparse p.
Var SpMM(std::shared_ptr<const SparseOperator> p, const Var& h);
// Multiplies row r of a by column[r] (column is rows x 1).
Var ScaleRows(const Var& a, const Var& column);
// Column c of a as a rows x 1 value.
Var Column(const Var& a, int c);
Var Pick(const Var& a, int row, int col);
Var Sum(const Var& a);

}  // namespace ad

// Central-difference gradient check. f builds a scalar loss on the given
// tape from the store. Returns max |a - n| / max(1, |a|, |n|) over every
// coordinate of the named parameters (all parameters when empty).
using LossBuilder = std::function<Var(Tape&, ParamStore&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  size_t worst_index = 0;
  size_t coordinates = 0;
};

GradCheckResult GradCheck(const LossBuilder& f, ParamStore& params, double eps,
                          const std::vector<std::string>& names = {});

}  // namespace treebias

#endif  // TREEBIAS_AUTODIFF_H_
