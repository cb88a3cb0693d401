#include "ngf/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "ngf/error.hpp"

namespace ngf {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::RowVectorXd>;
using MutVecMap = Eigen::Map<Eigen::RowVectorXd>;

Tape* common_tape(std::initializer_list<Var> vars) {
  Tape* tape = nullptr;
  for (const auto& v : vars) {
    if (!v.valid()) throw ContractError("operation on an empty Var");
    if (tape && v.tape() != tape) throw ContractError("operands recorded on different tapes");
    tape = v.tape();
  }
  return tape;
}

void require_rank2(const Var& v, const char* op) {
  if (v.value().rank() != 2) {
    throw DimensionError(std::string(op) + " expects a rank-2 tensor, got " + shape_str(v.shape()));
  }
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

template <class F>
Var unary_map(const char* op, Var x, F&& fwd, std::function<double(double in, double out)> deriv) {
  Tape* tape = common_tape({x});
  const auto& in = x.value();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(in[i]);
  return tape->record(op, {x}, Tensor(in.shape(), std::move(out)), [deriv](Tape& t, std::size_t self) {
    auto src = t.input(self, 0);
    if (!t.requires_grad(src)) return;
    const auto& xin = t.value(src);
    const auto& y = t.value(self);
    auto g = t.out_grad(self);
    auto dx = t.grad_buffer(src);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[i] * deriv(xin[i], y[i]);
  });
}

double stable_sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(ReduceKind kind) {
  switch (kind) {
    case ReduceKind::kMin: return "min";
    case ReduceKind::kMax: return "max";
    case ReduceKind::kMean: return "mean";
    case ReduceKind::kSum: return "sum";
  }
  return "?";
}

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("value() on an empty Var");
  return tape_->value(id_);
}

// ---------------------------------------------------------------------------
// Tape

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  Node n;
  n.op = "variable";
  n.value = std::move(value);
  n.value.set_requires_grad(true);
  n.leaf = true;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor& param) {
  Node n;
  n.op = "parameter";
  n.external = &param;
  n.grad_target = &param;
  n.leaf = true;
  n.requires_grad = param.requires_grad();
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(const Tensor& param) {
  Node n;
  n.op = "parameter";
  n.external = &param;
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(std::string_view op, std::vector<Var> inputs, Tensor value, Backprop backprop) {
  Node n;
  n.op = std::string(op);
  n.value = std::move(value);
  n.backprop = std::move(backprop);
  for (const auto& v : inputs) {
    if (v.tape() != this) throw ContractError("input of '" + n.op + "' recorded on another tape");
    n.inputs.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const auto& n = nodes_.at(id);
  return n.external ? *n.external : n.value;
}

std::span<double> Tape::grad_buffer(std::size_t id) {
  auto& n = nodes_[id];
  if (n.grad_target) return n.grad_target->grad();
  if (n.external) throw ContractError("gradient requested for a read-only parameter");
  if (n.grad.empty()) n.grad.assign(value(id).size(), 0.0);
  return n.grad;
}

std::span<const double> Tape::grad(Var v) const {
  const auto& n = nodes_.at(v.id());
  if (n.external) return n.external->grad_values();
  return n.grad;
}

void Tape::zero_grad() {
  for (auto& n : nodes_) {
    if (n.leaf && !n.external) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  }
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw ContractError("backward root recorded on another tape");
  if (value(root.id()).size() != 1) {
    throw ContractError("backward requires a scalar root, got shape " + shape_str(root.shape()));
  }
  const std::size_t r = root.id();
  std::vector<char> reachable(r + 1, 0);
  reachable[r] = 1;
  for (std::size_t i = r + 1; i-- > 0;) {
    if (!reachable[i]) continue;
    for (auto in : nodes_[i].inputs) reachable[in] = 1;
  }
  for (std::size_t i = 0; i <= r; ++i) {
    auto& n = nodes_[i];
    if (reachable[i] && !n.leaf && n.requires_grad) n.grad.assign(value(i).size(), 0.0);
  }
  if (!nodes_[r].requires_grad) return;
  grad_buffer(r)[0] += 1.0;
  for (std::size_t i = r + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!reachable[i] || n.leaf || !n.requires_grad || !n.backprop) continue;
    n.backprop(*this, i);
  }
}

// ---------------------------------------------------------------------------
// Linear algebra

Var affine(Var x, Var weight, Var bias) {
  Tape* tape = common_tape({x, weight, bias});
  require_rank2(x, "affine");
  require_rank2(weight, "affine");
  const auto& X = x.value();
  const auto& W = weight.value();
  const auto& b = bias.value();
  if (X.cols() != W.rows()) {
    throw DimensionError("affine: input " + shape_str(X.shape()) + " does not match weight " + shape_str(W.shape()));
  }
  if (b.size() != W.cols()) {
    throw DimensionError("affine: bias " + shape_str(b.shape()) + " does not match weight " + shape_str(W.shape()));
  }
  const auto n = X.rows(), din = W.rows(), dout = W.cols();
  std::vector<double> out(n * dout);
  MutMap Y(out.data(), n, dout);
  Y.noalias() = ConstMap(X.values().data(), n, din) * ConstMap(W.values().data(), din, dout);
  Y.rowwise() += ConstVecMap(b.values().data(), dout);
  return tape->record("affine", {x, weight, bias}, Tensor({n, dout}, std::move(out)),
                      [n, din, dout](Tape& t, std::size_t self) {
                        ConstMap G(t.out_grad(self).data(), n, dout);
                        auto xi = t.input(self, 0), wi = t.input(self, 1), bi = t.input(self, 2);
                        if (t.requires_grad(xi)) {
                          MutMap(t.grad_buffer(xi).data(), n, din).noalias() +=
                              G * ConstMap(t.value(wi).values().data(), din, dout).transpose();
                        }
                        if (t.requires_grad(wi)) {
                          MutMap(t.grad_buffer(wi).data(), din, dout).noalias() +=
                              ConstMap(t.value(xi).values().data(), n, din).transpose() * G;
                        }
                        if (t.requires_grad(bi)) {
                          MutVecMap(t.grad_buffer(bi).data(), dout) += G.colwise().sum();
                        }
                      });
}

// ---------------------------------------------------------------------------
// Elementwise

Var relu(Var x) {
  return unary_map(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var x) {
  return unary_map(
      "sigmoid", x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var sqrt_eps(Var x, double eps) {
  return unary_map(
      "sqrt", x,
      [eps](double v) {
        if (v + eps < 0.0) throw DomainError("sqrt of negative value");
        return std::sqrt(v + eps);
      },
      [](double, double y) { return 0.5 / y; });
}

Var scale(Var x, double factor) {
  return unary_map(
      "scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Var add_scalar(Var x, double c) {
  return unary_map(
      "add_scalar", x, [c](double v) { return v + c; }, [](double, double) { return 1.0; });
}

Var softmax_rows(Var x) {
  Tape* tape = common_tape({x});
  require_rank2(x, "softmax_rows");
  const auto& X = x.value();
  const auto n = X.rows(), c = X.cols();
  std::vector<double> out(n * c);
  for (std::size_t i = 0; i < n; ++i) {
    double m = X.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, X.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += (out[i * c + j] = std::exp(X.at(i, j) - m));
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  return tape->record("softmax_rows", {x}, Tensor({n, c}, std::move(out)), [n, c](Tape& t, std::size_t self) {
    auto src = t.input(self, 0);
    if (!t.requires_grad(src)) return;
    const auto& y = t.value(self);
    auto g = t.out_grad(self);
    auto dx = t.grad_buffer(src);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
      for (std::size_t j = 0; j < c; ++j) dx[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
    }
  });
}

namespace {

enum class Binary { kAdd, kSub, kMul, kMin, kMax };

Var binary(const char* op, Binary kind, Var a, Var b) {
  Tape* tape = common_tape({a, b});
  require_same_shape(a, b, op);
  const auto& A = a.value();
  const auto& B = b.value();
  std::vector<double> out(A.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (kind) {
      case Binary::kAdd: out[i] = A[i] + B[i]; break;
      case Binary::kSub: out[i] = A[i] - B[i]; break;
      case Binary::kMul: out[i] = A[i] * B[i]; break;
      case Binary::kMin: out[i] = B[i] < A[i] ? B[i] : A[i]; break;
      case Binary::kMax: out[i] = B[i] > A[i] ? B[i] : A[i]; break;
    }
  }
  return tape->record(op, {a, b}, Tensor(A.shape(), std::move(out)), [kind](Tape& t, std::size_t self) {
    auto ai = t.input(self, 0), bi = t.input(self, 1);
    const auto& av = t.value(ai);
    const auto& bv = t.value(bi);
    auto g = t.out_grad(self);
    const std::size_t n = g.size();
    if (t.requires_grad(ai)) {
      auto da = t.grad_buffer(ai);
      for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
          case Binary::kAdd:
          case Binary::kSub: da[i] += g[i]; break;
          case Binary::kMul: da[i] += g[i] * bv[i]; break;
          case Binary::kMin: if (!(bv[i] < av[i])) da[i] += g[i]; break;
          case Binary::kMax: if (!(bv[i] > av[i])) da[i] += g[i]; break;
        }
      }
    }
    if (t.requires_grad(bi)) {
      auto db = t.grad_buffer(bi);
      for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
          case Binary::kAdd: db[i] += g[i]; break;
          case Binary::kSub: db[i] -= g[i]; break;
          case Binary::kMul: db[i] += g[i] * av[i]; break;
          case Binary::kMin: if (bv[i] < av[i]) db[i] += g[i]; break;
          case Binary::kMax: if (bv[i] > av[i]) db[i] += g[i]; break;
        }
      }
    }
  });
}

}  // namespace

Var add(Var a, Var b) { return binary("add", Binary::kAdd, a, b); }
Var sub(Var a, Var b) { return binary("sub", Binary::kSub, a, b); }
Var mul(Var a, Var b) { return binary("mul", Binary::kMul, a, b); }
Var minimum(Var a, Var b) { return binary("minimum", Binary::kMin, a, b); }
Var maximum(Var a, Var b) { return binary("maximum", Binary::kMax, a, b); }

// ---------------------------------------------------------------------------
// Structural

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_cols of zero tensors");
  Tape* tape = parts.front().tape();
  std::size_t n = 0, total = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    if (p.tape() != tape) throw ContractError("concat_cols operands on different tapes");
    require_rank2(p, "concat_cols");
    if (widths.empty()) n = p.value().rows();
    if (p.value().rows() != n) throw DimensionError("concat_cols: row counts differ");
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  std::vector<double> out(n * total);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = parts[k].value();
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(v.values().data() + i * widths[k], widths[k], out.data() + i * total + off);
    }
    off += widths[k];
  }
  return tape->record("concat_cols", parts, Tensor({n, total}, std::move(out)),
                      [n, total, widths](Tape& t, std::size_t self) {
                        auto g = t.out_grad(self);
                        std::size_t off = 0;
                        for (std::size_t k = 0; k < widths.size(); ++k) {
                          auto src = t.input(self, k);
                          if (t.requires_grad(src)) {
                            auto d = t.grad_buffer(src);
                            for (std::size_t i = 0; i < n; ++i) {
                              for (std::size_t j = 0; j < widths[k]; ++j) d[i * widths[k] + j] += g[i * total + off + j];
                            }
                          }
                          off += widths[k];
                        }
                      });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  Tape* tape = common_tape({x});
  require_rank2(x, "slice_cols");
  const auto& X = x.value();
  const auto n = X.rows(), c = X.cols();
  if (begin >= end || end > c) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") outside " + std::to_string(c) + " columns");
  }
  const auto w = end - begin;
  std::vector<double> out(n * w);
  for (std::size_t i = 0; i < n; ++i) std::copy_n(X.values().data() + i * c + begin, w, out.data() + i * w);
  return tape->record("slice_cols", {x}, Tensor({n, w}, std::move(out)), [n, c, w, begin](Tape& t, std::size_t self) {
    auto src = t.input(self, 0);
    if (!t.requires_grad(src)) return;
    auto g = t.out_grad(self);
    auto d = t.grad_buffer(src);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < w; ++j) d[i * c + begin + j] += g[i * w + j];
    }
  });
}

Var gather_rows(Var x, std::shared_ptr<const RowIndex> rows) {
  Tape* tape = common_tape({x});
  require_rank2(x, "gather_rows");
  const auto& X = x.value();
  const auto n = X.rows(), c = X.cols();
  if (rows->empty()) throw DimensionError("gather_rows: empty index");
  std::vector<double> out(rows->size() * c);
  for (std::size_t i = 0; i < rows->size(); ++i) {
    auto r = (*rows)[i];
    if (r >= n) throw DimensionError("gather_rows: row " + std::to_string(r) + " out of " + std::to_string(n));
    std::copy_n(X.values().data() + r * c, c, out.data() + i * c);
  }
  return tape->record("gather_rows", {x}, Tensor({rows->size(), c}, std::move(out)),
                      [rows, c](Tape& t, std::size_t self) {
                        auto src = t.input(self, 0);
                        if (!t.requires_grad(src)) return;
                        auto g = t.out_grad(self);
                        auto d = t.grad_buffer(src);
                        for (std::size_t i = 0; i < rows->size(); ++i) {
                          auto r = (*rows)[i];
                          for (std::size_t j = 0; j < c; ++j) d[r * c + j] += g[i * c + j];
                        }
                      });
}

Var gather_rows(Var x, RowIndex rows) { return gather_rows(x, std::make_shared<const RowIndex>(std::move(rows))); }

// ---------------------------------------------------------------------------
// Reductions

Var reduce(Var x, std::size_t axis, ReduceKind kind) {
  Tape* tape = common_tape({x});
  const auto& X = x.value();
  if (axis >= X.rank()) {
    throw DimensionError("reduce: axis " + std::to_string(axis) + " out of rank " + std::to_string(X.rank()));
  }
  const auto& shape = X.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t k = 0; k < axis; ++k) outer *= shape[k];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  const std::size_t len = shape[axis];
  if (len == 0) throw DomainError("reduce over an empty axis");
  Shape out_shape;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k != axis) out_shape.push_back(shape[k]);
  }
  std::vector<double> out(outer * inner);
  std::vector<std::size_t> arg;
  if (kind == ReduceKind::kMin || kind == ReduceKind::kMax) arg.resize(out.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * len * inner + i;
      double acc = X[base];
      std::size_t best = 0;
      for (std::size_t k = 1; k < len; ++k) {
        double v = X[base + k * inner];
        switch (kind) {
          case ReduceKind::kMin: if (v < acc) { acc = v; best = k; } break;
          case ReduceKind::kMax: if (v > acc) { acc = v; best = k; } break;
          case ReduceKind::kMean:
          case ReduceKind::kSum: acc += v; break;
        }
      }
      if (kind == ReduceKind::kMean) acc /= static_cast<double>(len);
      out[o * inner + i] = acc;
      if (!arg.empty()) arg[o * inner + i] = best;
    }
  }
  return tape->record("reduce", {x}, Tensor(out_shape, std::move(out)),
                      [outer, inner, len, kind, arg = std::move(arg)](Tape& t, std::size_t self) {
                        auto src = t.input(self, 0);
                        if (!t.requires_grad(src)) return;
                        auto g = t.out_grad(self);
                        auto d = t.grad_buffer(src);
                        const double w = kind == ReduceKind::kMean ? 1.0 / static_cast<double>(len) : 1.0;
                        for (std::size_t o = 0; o < outer; ++o) {
                          for (std::size_t i = 0; i < inner; ++i) {
                            const std::size_t oi = o * inner + i;
                            const std::size_t base = o * len * inner + i;
                            if (!arg.empty()) {
                              d[base + arg[oi] * inner] += g[oi];
                            } else {
                              for (std::size_t k = 0; k < len; ++k) d[base + k * inner] += w * g[oi];
                            }
                          }
                        }
                      });
}

Var segment_reduce(Var x, std::shared_ptr<const RowGroups> groups, ReduceKind kind) {
  Tape* tape = common_tape({x});
  require_rank2(x, "segment_reduce");
  const auto& X = x.value();
  const auto n = X.rows(), c = X.cols();
  const auto m = groups->size();
  if (m == 0) throw DimensionError("segment_reduce: no groups");
  std::vector<double> out(m * c);
  std::vector<std::size_t> arg;
  const bool select = kind == ReduceKind::kMin || kind == ReduceKind::kMax;
  if (select) arg.resize(m * c);
  for (std::size_t gi = 0; gi < m; ++gi) {
    const auto& rows = (*groups)[gi];
    if (rows.empty()) throw DomainError("segment_reduce: group " + std::to_string(gi) + " is empty");
    for (auto r : rows) {
      if (r >= n) throw DimensionError("segment_reduce: row " + std::to_string(r) + " out of " + std::to_string(n));
    }
    for (std::size_t j = 0; j < c; ++j) {
      double acc = X.at(rows[0], j);
      std::size_t best = rows[0];
      for (std::size_t k = 1; k < rows.size(); ++k) {
        double v = X.at(rows[k], j);
        switch (kind) {
          case ReduceKind::kMin: if (v < acc) { acc = v; best = rows[k]; } break;
          case ReduceKind::kMax: if (v > acc) { acc = v; best = rows[k]; } break;
          case ReduceKind::kMean:
          case ReduceKind::kSum: acc += v; break;
        }
      }
      if (kind == ReduceKind::kMean) acc /= static_cast<double>(rows.size());
      out[gi * c + j] = acc;
      if (select) arg[gi * c + j] = best;
    }
  }
  return tape->record("segment_reduce", {x}, Tensor({m, c}, std::move(out)),
                      [groups, kind, c, arg = std::move(arg)](Tape& t, std::size_t self) {
                        auto src = t.input(self, 0);
                        if (!t.requires_grad(src)) return;
                        auto g = t.out_grad(self);
                        auto d = t.grad_buffer(src);
                        for (std::size_t gi = 0; gi < groups->size(); ++gi) {
                          const auto& rows = (*groups)[gi];
                          for (std::size_t j = 0; j < c; ++j) {
                            const double gv = g[gi * c + j];
                            if (!arg.empty()) {
                              d[arg[gi * c + j] * c + j] += gv;
                            } else {
                              const double w = kind == ReduceKind::kMean ? gv / static_cast<double>(rows.size()) : gv;
                              for (auto r : rows) d[r * c + j] += w;
                            }
                          }
                        }
                      });
}

Var segment_reduce(Var x, RowGroups groups, ReduceKind kind) {
  return segment_reduce(x, std::make_shared<const RowGroups>(std::move(groups)), kind);
}

Var sum(Var x) {
  Tape* tape = common_tape({x});
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  return tape->record("sum", {x}, Tensor::scalar(s), [](Tape& t, std::size_t self) {
    auto src = t.input(self, 0);
    if (!t.requires_grad(src)) return;
    const double g = t.out_grad(self)[0];
    for (auto& d : t.grad_buffer(src)) d += g;
  });
}

Var mean(Var x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().size())); }

// ---------------------------------------------------------------------------
// Losses

Var binary_cross_entropy(Var probs, std::vector<double> labels, std::vector<double> weights) {
  Tape* tape = common_tape({probs});
  const auto& P = probs.value();
  if (labels.size() != P.size() || weights.size() != P.size()) {
    throw DimensionError("binary_cross_entropy: " + std::to_string(P.size()) + " probabilities, " +
                         std::to_string(labels.size()) + " labels, " + std::to_string(weights.size()) + " weights");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double s = std::clamp(P[i], kProbClamp, 1.0 - kProbClamp);
    loss -= weights[i] * (labels[i] * std::log(s) + (1.0 - labels[i]) * std::log(1.0 - s));
  }
  return tape->record("binary_cross_entropy", {probs}, Tensor::scalar(loss),
                      [labels = std::move(labels), weights = std::move(weights)](Tape& t, std::size_t self) {
                        auto src = t.input(self, 0);
                        if (!t.requires_grad(src)) return;
                        const double g = t.out_grad(self)[0];
                        const auto& p = t.value(src);
                        auto d = t.grad_buffer(src);
                        for (std::size_t i = 0; i < d.size(); ++i) {
                          const double raw = p[i];
                          if (raw < kProbClamp || raw > 1.0 - kProbClamp) continue;
                          d[i] += g * weights[i] * (-labels[i] / raw + (1.0 - labels[i]) / (1.0 - raw));
                        }
                      });
}

Var focal_loss(Var probs, std::vector<int> targets, double gamma, std::vector<double> weights) {
  Tape* tape = common_tape({probs});
  require_rank2(probs, "focal_loss");
  if (gamma < 0.0) throw DomainError("focal_loss: gamma must be nonnegative");
  const auto& P = probs.value();
  const auto n = P.rows(), c = P.cols();
  if (targets.size() != n || weights.size() != n) throw DimensionError("focal_loss: targets/weights per row");
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] < 0) continue;
    if (static_cast<std::size_t>(targets[i]) >= c) throw DimensionError("focal_loss: target class out of range");
    const double p = std::max(P.at(i, targets[i]), kProbClamp);
    loss -= weights[i] * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return tape->record("focal_loss", {probs}, Tensor::scalar(loss),
                      [targets = std::move(targets), weights = std::move(weights), gamma, c](Tape& t, std::size_t self) {
                        auto src = t.input(self, 0);
                        if (!t.requires_grad(src)) return;
                        const double g = t.out_grad(self)[0];
                        const auto& P = t.value(src);
                        auto d = t.grad_buffer(src);
                        for (std::size_t i = 0; i < targets.size(); ++i) {
                          if (targets[i] < 0) continue;
                          const std::size_t k = i * c + static_cast<std::size_t>(targets[i]);
                          const double p = P[k];
                          if (p < kProbClamp) continue;
                          const double q = 1.0 - p;
                          double dp = -std::pow(q, gamma) / p;
                          if (gamma != 0.0 && q > 0.0) dp += gamma * std::pow(q, gamma - 1.0) * std::log(p);
                          d[k] += g * weights[i] * dp;
                        }
                      });
}

}  // namespace ngf
