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

#include "treebias/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "treebias/errors.h"
#include "treebias/kernels.h"

namespace treebias {

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw DomainError("use of an unbound Var");
  return tape_->value(id_);
}

double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw DomainError("scalar() on " + v.ShapeString());
  return v[0];
}

Var Tape::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Param(ParamStore& store, const std::string& name) {
  ParamStore::Entry& e = store.entry(name);
  auto it = param_ids_.find(&e);
  if (it != param_ids_.end()) return Var(this, it->second);
  Node n;
  n.value = e.value;
  n.requires_grad = record_ && e.trainable;
  n.param = &e;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_ids_.emplace(&e, id);
  return Var(this, id);
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return Record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::Record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (const Var& in : inputs) {
      if (in.tape() != this) throw DomainError("mixing values from different tapes");
      if (nodes_[in.id()].requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Tape::GradOf(const Var& v) {
  Node& n = nodes_.at(v.id());
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::Backward(const Var& loss) {
  if (!record_) throw DomainError("Backward() on a non-recording tape");
  if (loss.tape() != this) throw DomainError("loss belongs to another tape");
  if (loss.value().size() != 1) throw DomainError("loss must be a scalar");
  if (!std::isfinite(loss.scalar())) throw NumericError("non-finite loss");
  if (nodes_[loss.id()].requires_grad) {
    GradOf(loss)[0] = 1.0;
    for (int id = loss.id(); id >= 0; --id) {
      Node& n = nodes_[id];
      if (!n.requires_grad || n.grad.empty()) continue;
      if (n.param != nullptr) {
        auto dst = n.param->grad.data();
        auto src = n.grad.data();
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      } else if (n.backward) {
        n.backward(*this, n.grad);
      }
    }
  }
  Clear();
}

void Tape::Clear() {
  nodes_.clear();
  param_ids_.clear();
}

namespace ad {
namespace {

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  if (!a.value().SameShape(b.value())) {
    throw DomainError(std::string(op) + ": shape mismatch " + a.value().ShapeString() +
                      " vs " + b.value().ShapeString());
  }
}

template <typename F>
Tensor Map(const Tensor& a, F f) {
  Tensor out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

Var MatMul(const Var& a, const Var& b) {
  Tensor out(a.rows(), b.cols());
  kernels::MatMul(a.value(), b.value(), &out);
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) kernels::MatMulBT(g, b.value(), &t.GradOf(a), true);
    if (t.RequiresGrad(b)) kernels::MatMulAT(a.value(), g, &t.GradOf(b), true);
  });
}

Var MatMulBT(const Var& a, const Var& b) {
  Tensor out(a.rows(), b.rows());
  kernels::MatMulBT(a.value(), b.value(), &out);
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) kernels::MatMul(g, b.value(), &t.GradOf(a), true);
    if (t.RequiresGrad(b)) kernels::MatMulAT(g, a.value(), &t.GradOf(b), true);
  });
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  Tensor out = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    for (const Var& v : {a, b}) {
      if (!t.RequiresGrad(v)) continue;
      Tensor& gv = t.GradOf(v);
      for (size_t i = 0; i < g.size(); ++i) gv[i] += g[i];
    }
  });
}

Var AddRow(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DomainError("AddRow: row " + row.value().ShapeString() + " vs " +
                      a.value().ShapeString());
  }
  Tensor out = a.value();
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) out(r, c) += row.value()(0, c);
  }
  return a.tape()->Record(std::move(out), {a, row}, [a, row](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradOf(a);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.RequiresGrad(row)) {
      Tensor& gr = t.GradOf(row);
      for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) gr(0, c) += g(r, c);
      }
    }
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  Tensor out = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradOf(a);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.RequiresGrad(b)) {
      Tensor& gb = t.GradOf(b);
      for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  Tensor out = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradOf(a);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b.value()[i];
    }
    if (t.RequiresGrad(b)) {
      Tensor& gb = t.GradOf(b);
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a.value()[i];
    }
  });
}

Var Scale(const Var& a, double c) {
  Tensor out = Map(a.value(), [c](double v) { return c * v; });
  return a.tape()->Record(std::move(out), {a}, [a, c](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
  });
}

Var ScaleBy(const Var& a, const Var& s) {
  const double c = s.scalar();
  Tensor out = Map(a.value(), [c](double v) { return c * v; });
  return a.tape()->Record(std::move(out), {a, s}, [a, s](Tape& t, const Tensor& g) {
    const double c = s.scalar();
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradOf(a);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
    }
    if (t.RequiresGrad(s)) {
      double acc = 0.0;
      for (size_t i = 0; i < g.size(); ++i) acc += g[i] * a.value()[i];
      t.GradOf(s)[0] += acc;
    }
  });
}

Var AddScalar(const Var& a, double c) {
  Tensor out = Map(a.value(), [c](double v) { return v + c; });
  return a.tape()->Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var Relu(const Var& a) {
  Tensor out = Map(a.value(), [](double v) { return v > 0.0 ? v : 0.0; });
  return a.tape()->Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) {
      if (a.value()[i] > 0.0) ga[i] += g[i];
    }
  });
}

Var Sigmoid(const Var& a) {
  Tensor out = Map(a.value(), [](double v) {
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  });
  Tensor y = out;
  return a.tape()->Record(std::move(out), {a}, [a, y = std::move(y)](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tanh(const Var& a) {
  Tensor out = Map(a.value(), [](double v) { return std::tanh(v); });
  return a.tape()->Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) {
      const double y = std::tanh(a.value()[i]);
      ga[i] += g[i] * (1.0 - y * y);
    }
  });
}

Var Log(const Var& a) {
  Tensor out = Map(a.value(), [](double v) { return std::log(v); });
  return a.tape()->Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / a.value()[i];
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw DomainError("ConcatCols of nothing");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw DomainError("ConcatCols: row count mismatch");
    cols += p.cols();
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (const Var& p : parts) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < p.cols(); ++c) out(r, offset + c) = p.value()(r, c);
    }
    offset += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape()->Record(std::move(out), inputs, [inputs](Tape& t, const Tensor& g) {
    int offset = 0;
    for (const Var& p : inputs) {
      if (t.RequiresGrad(p)) {
        Tensor& gp = t.GradOf(p);
        for (int r = 0; r < gp.rows(); ++r) {
          for (int c = 0; c < gp.cols(); ++c) gp(r, c) += g(r, offset + c);
        }
      }
      offset += p.cols();
    }
  });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw DomainError("ConcatRows of nothing");
  const int cols = parts[0].cols();
  int rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw DomainError("ConcatRows: column count mismatch");
    rows += p.rows();
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (const Var& p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(),
              out.data().begin() + size_t(offset) * cols);
    offset += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape()->Record(std::move(out), inputs, [inputs](Tape& t, const Tensor& g) {
    int offset = 0;
    for (const Var& p : inputs) {
      if (t.RequiresGrad(p)) {
        Tensor& gp = t.GradOf(p);
        const size_t base = size_t(offset) * gp.cols();
        for (size_t i = 0; i < gp.size(); ++i) gp[i] += g[base + i];
      }
      offset += p.rows();
    }
  });
}

Var GatherRows(const Var& a, std::vector<int> rows) {
  const int cols = a.cols();
  Tensor out(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw DomainError("GatherRows: index out of range");
    auto src = a.value().row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(int(i)).begin());
  }
  return a.tape()->Record(std::move(out), {a},
                          [a, rows = std::move(rows)](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < rows.size(); ++i) {
      auto src = g.row(int(i));
      auto dst = ga.row(rows[i]);
      for (size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
    }
  });
}

Var SegmentMax(const Var& a, std::vector<std::vector<int>> segments) {
  const int cols = a.cols();
  const int out_rows = static_cast<int>(segments.size());
  Tensor out(out_rows, cols);
  std::vector<int> argmax(size_t(out_rows) * cols, -1);
  for (int s = 0; s < out_rows; ++s) {
    auto& seg = segments[s];
    std::sort(seg.begin(), seg.end());
    for (int c = 0; c < cols; ++c) {
      int best = -1;
      double best_v = 0.0;
      for (int r : seg) {
        if (r < 0 || r >= a.rows()) throw DomainError("SegmentMax: index out of range");
        const double v = a.value()(r, c);
        if (best < 0 || v > best_v) {
          best = r;
          best_v = v;
        }
      }
      argmax[size_t(s) * cols + c] = best;
      out(s, c) = best < 0 ? 0.0 : best_v;
    }
  }
  return a.tape()->Record(std::move(out), {a},
                          [a, argmax = std::move(argmax), cols](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < argmax.size(); ++i) {
      if (argmax[i] >= 0) ga(argmax[i], int(i % cols)) += g[i];
    }
  });
}

Var LayerNorm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const int rows = x.rows(), cols = x.cols();
  if (gain.rows() != 1 || gain.cols() != cols || !gain.value().SameShape(bias.value())) {
    throw DomainError("LayerNorm: gain/bias shape mismatch");
  }
  Tensor xhat(rows, cols);
  std::vector<double> inv_std(rows);
  Tensor out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    auto xr = x.value().row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean /= cols;
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var /= cols;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (int c = 0; c < cols; ++c) {
      xhat(r, c) = (xr[c] - mean) * inv_std[r];
      out(r, c) = xhat(r, c) * gain.value()(0, c) + bias.value()(0, c);
    }
  }
  return x.tape()->Record(
      std::move(out), {x, gain, bias},
      [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          Tape& t, const Tensor& g) {
        const int rows = g.rows(), cols = g.cols();
        if (t.RequiresGrad(gain) || t.RequiresGrad(bias)) {
          Tensor& gg = t.GradOf(gain);
          Tensor& gb = t.GradOf(bias);
          for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
              gg(0, c) += g(r, c) * xhat(r, c);
              gb(0, c) += g(r, c);
            }
          }
        }
        if (!t.RequiresGrad(x)) return;
        Tensor& gx = t.GradOf(x);
        std::vector<double> dxhat(cols);
        for (int r = 0; r < rows; ++r) {
          double sum_d = 0.0, sum_dx = 0.0;
          for (int c = 0; c < cols; ++c) {
            dxhat[c] = g(r, c) * gain.value()(0, c);
            sum_d += dxhat[c];
            sum_dx += dxhat[c] * xhat(r, c);
          }
          for (int c = 0; c < cols; ++c) {
            gx(r, c) += inv_std[r] / cols *
                        (cols * dxhat[c] - sum_d - xhat(r, c) * sum_dx);
          }
        }
      });
}

namespace {

void SoftmaxBackwardRow(std::span<const double> y, std::span<const double> g,
                        std::span<double> gx) {
  double dot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) dot += y[i] * g[i];
  for (size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - dot);
}

}  // namespace

Var Softmax(const Var& a) {
  Tensor out(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r) {
    auto in = a.value().row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (int c = 0; c < a.cols(); ++c) z += (out(r, c) = std::exp(in[c] - m));
    for (int c = 0; c < a.cols(); ++c) out(r, c) /= z;
  }
  Tensor y = out;
  return a.tape()->Record(std::move(out), {a}, [a, y = std::move(y)](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (int r = 0; r < y.rows(); ++r) SoftmaxBackwardRow(y.row(r), g.row(r), ga.row(r));
  });
}

Var MaskedSoftmax(const Var& logits, const std::vector<bool>& mask) {
  if (logits.rows() != 1 || size_t(logits.cols()) != mask.size()) {
    throw DomainError("MaskedSoftmax: mask length does not match logits " +
                      logits.value().ShapeString());
  }
  if (std::none_of(mask.begin(), mask.end(), [](bool m) { return m; })) {
    throw DomainError("MaskedSoftmax: every entry is masked");
  }
  const auto in = logits.value().row(0);
  double m = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < mask.size(); ++c) {
    if (mask[c]) m = std::max(m, in[c]);
  }
  Tensor out(1, logits.cols());
  double z = 0.0;
  for (size_t c = 0; c < mask.size(); ++c) {
    if (mask[c]) z += (out[c] = std::exp(in[c] - m));
  }
  for (size_t c = 0; c < mask.size(); ++c) out[c] /= z;
  Tensor y = out;
  return logits.tape()->Record(std::move(out), {logits},
                               [logits, y = std::move(y)](Tape& t, const Tensor& g) {
    // Masked entries have y = 0 and therefore receive no gradient.
    SoftmaxBackwardRow(y.row(0), g.row(0), t.GradOf(logits).row(0));
  });
}

std::shared_ptr<const SparseOperator> MakeSparseOperator(SparseMatrix p) {
  auto op = std::make_shared<SparseOperator>();
  op->transpose = p.Transpose();
  op->forward = std::move(p);
  return op;
}

Var SpMM(std::shared_ptr<const SparseOperator> p, const Var& h) {
  Tensor out(p->forward.rows(), h.cols());
  kernels::SpMM(p->forward, h.value(), &out);
  return h.tape()->Record(std::move(out), {h}, [h, p = std::move(p)](Tape& t, const Tensor& g) {
    kernels::SpMM(p->transpose, g, &t.GradOf(h), true);
  });
}

Var ScaleRows(const Var& a, const Var& column) {
  if (column.cols() != 1 || column.rows() != a.rows()) {
    throw DomainError("ScaleRows: column " + column.value().ShapeString() + " vs " +
                      a.value().ShapeString());
  }
  Tensor out = a.value();
  for (int r = 0; r < out.rows(); ++r) {
    for (double& v : out.row(r)) v *= column.value()(r, 0);
  }
  return a.tape()->Record(std::move(out), {a, column}, [a, column](Tape& t, const Tensor& g) {
    if (t.RequiresGrad(a)) {
      Tensor& ga = t.GradOf(a);
      for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) ga(r, c) += g(r, c) * column.value()(r, 0);
      }
    }
    if (t.RequiresGrad(column)) {
      Tensor& gc = t.GradOf(column);
      for (int r = 0; r < g.rows(); ++r) {
        double acc = 0.0;
        for (int c = 0; c < g.cols(); ++c) acc += g(r, c) * a.value()(r, c);
        gc(r, 0) += acc;
      }
    }
  });
}

Var Column(const Var& a, int c) {
  if (c < 0 || c >= a.cols()) throw DomainError("Column: index out of range");
  Tensor out(a.rows(), 1);
  for (int r = 0; r < a.rows(); ++r) out(r, 0) = a.value()(r, c);
  return a.tape()->Record(std::move(out), {a}, [a, c](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (int r = 0; r < g.rows(); ++r) ga(r, c) += g(r, 0);
  });
}

Var Pick(const Var& a, int row, int col) {
  if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols()) {
    throw DomainError("Pick: index out of range");
  }
  Tensor out(1, 1, a.value()(row, col));
  return a.tape()->Record(std::move(out), {a}, [a, row, col](Tape& t, const Tensor& g) {
    t.GradOf(a)(row, col) += g[0];
  });
}

Var Sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape()->Record(Tensor(1, 1, s), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& ga = t.GradOf(a);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

}  // namespace ad

GradCheckResult GradCheck(const LossBuilder& f, ParamStore& params, double eps,
                          const std::vector<std::string>& names) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw DomainError("grad check step outside [1e-7, 1e-3]");
  const std::vector<std::string> targets = names.empty() ? params.Names() : names;

  params.ZeroGrad();
  {
    Tape tape;
    Var loss = f(tape, params);
    tape.Backward(loss);
  }
  auto evaluate = [&]() {
    Tape tape(false);
    const double v = f(tape, params).scalar();
    if (!std::isfinite(v)) throw NumericError("non-finite loss during grad check");
    return v;
  };

  GradCheckResult result;
  for (const auto& name : targets) {
    auto& e = params.entry(name);
    for (size_t i = 0; i < e.value.size(); ++i) {
      const double saved = e.value[i];
      e.value[i] = saved + eps;
      const double up = evaluate();
      e.value[i] = saved - eps;
      const double down = evaluate();
      e.value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = e.grad[i];
      if (!std::isfinite(analytic)) throw NumericError("non-finite gradient in '" + name + "'");
      const double rel = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      ++result.coordinates;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace treebias
