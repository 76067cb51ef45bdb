#include "seqtab/graph.hpp"

#include <algorithm>
#include <cmath>

#include "seqtab/kernels.hpp"

namespace seqtab {

std::string shape_str(const Shape& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

size_t shape_size(const Shape& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension in shape " + shape_str(shape));
    n *= static_cast<size_t>(d);
  }
  return n;
}

double UniformInit::next_unit() {
  // splitmix64
  unsigned long long z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

template <typename T>
Var<T> Graph<T>::constant(Array<T> value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
Var<T> Graph<T>::variable(Array<T> value) {
  Node n;
  n.op = "variable";
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
Var<T> Graph<T>::param(Parameter<T>& p) {
  auto it = param_ids_.find(&p);
  if (it != param_ids_.end()) return {this, it->second};
  Node n;
  n.op = "param:" + p.name;
  n.value_ref = &p.value;
  n.grad_ext = &p.grad;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_ids_.emplace(&p, id);
  return {this, id};
}

template <typename T>
Var<T> Graph<T>::make_node(std::string op, Array<T> value, std::vector<int> parents, BackwardFn backward) {
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  for (int p : parents) n.requires_grad = n.requires_grad || nodes_.at(static_cast<size_t>(p)).requires_grad;
  n.parents = std::move(parents);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
const Array<T>& Graph<T>::value(int id) const {
  const Node& n = nodes_.at(static_cast<size_t>(id));
  return n.value_ref ? *n.value_ref : n.value;
}

template <typename T>
Array<T>& Graph<T>::grad_ref(int id) {
  Node& n = nodes_.at(static_cast<size_t>(id));
  const Array<T>& v = n.value_ref ? *n.value_ref : n.value;
  if (n.grad_ext) {
    if (n.grad_ext->shape() != v.shape()) *n.grad_ext = Array<T>(v.shape());
    n.has_grad = true;
    return *n.grad_ext;
  }
  if (!n.has_grad) {
    n.grad = Array<T>(v.shape());
    n.has_grad = true;
  }
  return n.grad;
}

template <typename T>
Array<T> Graph<T>::grad(Var<T> v) const {
  const Node& n = nodes_.at(static_cast<size_t>(v.id));
  if (n.grad_ext) return *n.grad_ext;
  if (!n.has_grad) return Array<T>(value(v.id).shape());
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var<T> loss) {
  if (loss.graph != this) throw ShapeError("backward: loss belongs to another graph");
  if (value(loss.id).size() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " + shape_str(value(loss.id).shape()));
  }
  grad_ref(loss.id)[0] += T(1);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, id);
  }
}

template class Graph<float>;
template class Graph<double>;

namespace ad {

namespace {

struct AxisSplit {
  size_t outer = 1, n = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, int axis) {
  AxisSplit a;
  for (int i = 0; i < axis; ++i) a.outer *= static_cast<size_t>(s[static_cast<size_t>(i)]);
  a.n = static_cast<size_t>(s[static_cast<size_t>(axis)]);
  for (size_t i = static_cast<size_t>(axis) + 1; i < s.size(); ++i) a.inner *= static_cast<size_t>(s[i]);
  return a;
}

void check_axis(const char* op, const Shape& s, int axis) {
  if (axis < 0 || axis >= static_cast<int>(s.size())) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " invalid for shape " + shape_str(s));
  }
}

// Broadcast kind for binary elementwise ops.
enum class Bcast { kSame, kLeading };

template <typename T>
Bcast broadcast_kind(const char* op, const Array<T>& a, const Array<T>& b) {
  if (a.shape() == b.shape()) return Bcast::kSame;
  if (a.rank() >= 1) {
    Shape tail(a.shape().begin() + 1, a.shape().end());
    Shape one_tail = tail;
    one_tail.insert(one_tail.begin(), 1);
    if (tail.empty()) tail = {1};
    if (b.shape() == tail || b.shape() == one_tail) return Bcast::kLeading;
  }
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
}

template <typename T, typename F, typename D>
Var<T> unary(const char* name, Var<T> x, F f, D dfdx_from_y_x) {
  Graph<T>& g = *x.graph;
  const Array<T>& xv = x.value();
  Array<T> y(xv.shape());
  for (size_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  return g.make_node(name, std::move(y), {x.id}, [x = x.id, dfdx_from_y_x](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const Array<T>& yv = g.value(self);
    const Array<T>& xv = g.value(x);
    const Array<T>& gy = g.grad_ref(self);
    Array<T>& gx = g.grad_ref(x);
    for (size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * dfdx_from_y_x(yv[i], xv[i]);
  });
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_str(av.shape()) + " and " + shape_str(bv.shape()));
  }
  const int m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Array<T> c({m, n});
  kernels::gemm<T>(false, false, m, n, k, T(1), av.data(), k, bv.data(), n, T(0), c.data(), n);
  return a.graph->make_node("matmul", std::move(c), {a.id, b.id}, [a = a.id, b = b.id, m, n, k](Graph<T>& g, int self) {
    const Array<T>& gc = g.grad_ref(self);
    if (g.requires_grad(a)) {
      Array<T>& ga = g.grad_ref(a);
      kernels::gemm<T>(false, true, m, k, n, T(1), gc.data(), n, g.value(b).data(), n, T(1), ga.data(), k);
    }
    if (g.requires_grad(b)) {
      Array<T>& gb = g.grad_ref(b);
      kernels::gemm<T>(true, false, k, n, m, T(1), g.value(a).data(), k, gc.data(), n, T(1), gb.data(), n);
    }
  });
}

template <typename T>
Var<T> bilinear(Var<T> x, Var<T> w, Var<T> y) {
  const Array<T>& xv = x.value();
  const Array<T>& wv = w.value();
  const Array<T>& yv = y.value();
  if (wv.rank() != 2 || xv.size() != static_cast<size_t>(wv.dim(0)) || yv.size() != static_cast<size_t>(wv.dim(1))) {
    throw ShapeError("bilinear: incompatible shapes x " + shape_str(xv.shape()) + ", W " + shape_str(wv.shape()) +
                     ", y " + shape_str(yv.shape()));
  }
  const int n = wv.dim(0), m = wv.dim(1);
  std::vector<T> wy(static_cast<size_t>(n));
  kernels::gemm<T>(false, false, n, 1, m, T(1), wv.data(), m, yv.data(), 1, T(0), wy.data(), 1);
  T z = T(0);
  for (int i = 0; i < n; ++i) z += xv[static_cast<size_t>(i)] * wy[static_cast<size_t>(i)];
  return x.graph->make_node(
      "bilinear", Array<T>::scalar(z), {x.id, w.id, y.id}, [x = x.id, w = w.id, y = y.id, n, m](Graph<T>& g, int self) {
        const T gz = g.grad_ref(self)[0];
        const Array<T>& xv = g.value(x);
        const Array<T>& wv = g.value(w);
        const Array<T>& yv = g.value(y);
        if (g.requires_grad(x)) {
          Array<T>& gx = g.grad_ref(x);
          kernels::gemm<T>(false, false, n, 1, m, gz, wv.data(), m, yv.data(), 1, T(1), gx.data(), 1);
        }
        if (g.requires_grad(w)) {
          Array<T>& gw = g.grad_ref(w);
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) gw[static_cast<size_t>(i) * m + j] += gz * xv[static_cast<size_t>(i)] * yv[static_cast<size_t>(j)];
          }
        }
        if (g.requires_grad(y)) {
          Array<T>& gy = g.grad_ref(y);
          kernels::gemm<T>(true, false, m, 1, n, gz, wv.data(), m, xv.data(), 1, T(1), gy.data(), 1);
        }
      });
}

template <typename T>
Var<T> relu(Var<T> x) {
  return unary<T>(
      "relu", x, [](T v) { return v > T(0) ? v : T(0); }, [](T, T xv) { return xv > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> sigmoid(Var<T> x) {
  return unary<T>(
      "sigmoid", x,
      [](T v) {
        if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T y, T) { return y * (T(1) - y); });
}

template <typename T>
Var<T> tanh(Var<T> x) {
  return unary<T>(
      "tanh", x, [](T v) { return std::tanh(v); }, [](T y, T) { return T(1) - y * y; });
}

template <typename T>
Var<T> softmax(Var<T> x, int axis) {
  const Array<T>& xv = x.value();
  check_axis("softmax", xv.shape(), axis);
  const AxisSplit s = split_axis(xv.shape(), axis);
  Array<T> y(xv.shape());
  for (size_t o = 0; o < s.outer; ++o) {
    for (size_t in = 0; in < s.inner; ++in) {
      auto idx = [&](size_t k) { return (o * s.n + k) * s.inner + in; };
      T mx = xv[idx(0)];
      for (size_t k = 1; k < s.n; ++k) mx = std::max(mx, xv[idx(k)]);
      T total = T(0);
      for (size_t k = 0; k < s.n; ++k) {
        y[idx(k)] = std::exp(xv[idx(k)] - mx);
        total += y[idx(k)];
      }
      for (size_t k = 0; k < s.n; ++k) y[idx(k)] /= total;
    }
  }
  return x.graph->make_node("softmax", std::move(y), {x.id}, [x = x.id, s](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const Array<T>& yv = g.value(self);
    const Array<T>& gy = g.grad_ref(self);
    Array<T>& gx = g.grad_ref(x);
    for (size_t o = 0; o < s.outer; ++o) {
      for (size_t in = 0; in < s.inner; ++in) {
        auto idx = [&](size_t k) { return (o * s.n + k) * s.inner + in; };
        T dot = T(0);
        for (size_t k = 0; k < s.n; ++k) dot += gy[idx(k)] * yv[idx(k)];
        for (size_t k = 0; k < s.n; ++k) gx[idx(k)] += yv[idx(k)] * (gy[idx(k)] - dot);
      }
    }
  });
}

template <typename T>
Var<T> sum(Var<T> x, int axis) {
  const Array<T>& xv = x.value();
  check_axis("sum", xv.shape(), axis);
  const AxisSplit s = split_axis(xv.shape(), axis);
  Shape out_shape = xv.shape();
  out_shape.erase(out_shape.begin() + axis);
  if (out_shape.empty()) out_shape = {1};
  Array<T> y(out_shape);
  for (size_t o = 0; o < s.outer; ++o) {
    for (size_t k = 0; k < s.n; ++k) {
      for (size_t in = 0; in < s.inner; ++in) y[o * s.inner + in] += xv[(o * s.n + k) * s.inner + in];
    }
  }
  return x.graph->make_node("sum", std::move(y), {x.id}, [x = x.id, s](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const Array<T>& gy = g.grad_ref(self);
    Array<T>& gx = g.grad_ref(x);
    for (size_t o = 0; o < s.outer; ++o) {
      for (size_t k = 0; k < s.n; ++k) {
        for (size_t in = 0; in < s.inner; ++in) gx[(o * s.n + k) * s.inner + in] += gy[o * s.inner + in];
      }
    }
  });
}

template <typename T>
Var<T> sum_all(Var<T> x) {
  const Array<T>& xv = x.value();
  T total = T(0);
  for (T v : xv.values()) total += v;
  return x.graph->make_node("sum_all", Array<T>::scalar(total), {x.id}, [x = x.id](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const T gy = g.grad_ref(self)[0];
    for (auto& v : g.grad_ref(x).values()) v += gy;
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  const Bcast kind = broadcast_kind("add", av, bv);
  const size_t inner = bv.size();
  Array<T> c(av.shape());
  for (size_t i = 0; i < av.size(); ++i) c[i] = av[i] + (kind == Bcast::kSame ? bv[i] : bv[i % inner]);
  return a.graph->make_node("add", std::move(c), {a.id, b.id}, [a = a.id, b = b.id, kind, inner](Graph<T>& g, int self) {
    const Array<T>& gc = g.grad_ref(self);
    if (g.requires_grad(a)) {
      Array<T>& ga = g.grad_ref(a);
      for (size_t i = 0; i < gc.size(); ++i) ga[i] += gc[i];
    }
    if (g.requires_grad(b)) {
      Array<T>& gb = g.grad_ref(b);
      for (size_t i = 0; i < gc.size(); ++i) gb[kind == Bcast::kSame ? i : i % inner] += gc[i];
    }
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  const Array<T>& av = a.value();
  const Array<T>& bv = b.value();
  const Bcast kind = broadcast_kind("mul", av, bv);
  const size_t inner = bv.size();
  Array<T> c(av.shape());
  for (size_t i = 0; i < av.size(); ++i) c[i] = av[i] * (kind == Bcast::kSame ? bv[i] : bv[i % inner]);
  return a.graph->make_node("mul", std::move(c), {a.id, b.id}, [a = a.id, b = b.id, kind, inner](Graph<T>& g, int self) {
    const Array<T>& gc = g.grad_ref(self);
    const Array<T>& av = g.value(a);
    const Array<T>& bv = g.value(b);
    if (g.requires_grad(a)) {
      Array<T>& ga = g.grad_ref(a);
      for (size_t i = 0; i < gc.size(); ++i) ga[i] += gc[i] * (kind == Bcast::kSame ? bv[i] : bv[i % inner]);
    }
    if (g.requires_grad(b)) {
      Array<T>& gb = g.grad_ref(b);
      for (size_t i = 0; i < gc.size(); ++i) gb[kind == Bcast::kSame ? i : i % inner] += gc[i] * av[i];
    }
  });
}

template <typename T>
Var<T> concat(const std::vector<Var<T>>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts[0].shape();
  check_axis("concat", first, axis);
  Shape out_shape = first;
  out_shape[static_cast<size_t>(axis)] = 0;
  std::vector<int> ids;
  std::vector<size_t> widths;  // n * inner per part
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (size_t i = 0; ok && i < s.size(); ++i) ok = (static_cast<int>(i) == axis) || s[i] == first[i];
    if (!ok) throw ShapeError("concat: incompatible shapes " + shape_str(first) + " and " + shape_str(s));
    out_shape[static_cast<size_t>(axis)] += s[static_cast<size_t>(axis)];
    ids.push_back(p.id);
    auto sp = split_axis(s, axis);
    widths.push_back(sp.n * sp.inner);
  }
  const AxisSplit so = split_axis(out_shape, axis);
  const size_t out_width = so.n * so.inner;
  Array<T> y(out_shape);
  size_t offset = 0;
  for (size_t pi = 0; pi < parts.size(); ++pi) {
    const Array<T>& pv = parts[pi].value();
    for (size_t o = 0; o < so.outer; ++o) {
      std::copy_n(pv.data() + o * widths[pi], widths[pi], y.data() + o * out_width + offset);
    }
    offset += widths[pi];
  }
  return parts[0].graph->make_node(
      "concat", std::move(y), ids, [ids, widths, outer = so.outer, out_width](Graph<T>& g, int self) {
        const Array<T>& gy = g.grad_ref(self);
        size_t offset = 0;
        for (size_t pi = 0; pi < ids.size(); ++pi) {
          if (g.requires_grad(ids[pi])) {
            Array<T>& gp = g.grad_ref(ids[pi]);
            for (size_t o = 0; o < outer; ++o) {
              for (size_t k = 0; k < widths[pi]; ++k) gp[o * widths[pi] + k] += gy[o * out_width + offset + k];
            }
          }
          offset += widths[pi];
        }
      });
}

template <typename T>
Var<T> embedding_lookup(Var<T> table, std::vector<int> indices) {
  const Array<T>& tv = table.value();
  if (tv.rank() != 2) throw ShapeError("embedding_lookup: table must be 2-D, got " + shape_str(tv.shape()));
  const int rows = tv.dim(0), width = tv.dim(1);
  Array<T> y({static_cast<int>(indices.size()), width});
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= rows) {
      throw ShapeError("embedding_lookup: index " + std::to_string(indices[i]) + " out of range for table " +
                       shape_str(tv.shape()));
    }
    std::copy_n(tv.data() + static_cast<size_t>(indices[i]) * width, width, y.data() + i * width);
  }
  return table.graph->make_node("embedding_lookup", std::move(y), {table.id},
                                [t = table.id, indices = std::move(indices), width](Graph<T>& g, int self) {
                                  if (!g.requires_grad(t)) return;
                                  const Array<T>& gy = g.grad_ref(self);
                                  Array<T>& gt = g.grad_ref(t);
                                  for (size_t i = 0; i < indices.size(); ++i) {
                                    T* dst = gt.data() + static_cast<size_t>(indices[i]) * width;
                                    const T* src = gy.data() + i * width;
                                    for (int k = 0; k < width; ++k) dst[k] += src[k];
                                  }
                                });
}

template <typename T>
Var<T> reshape(Var<T> x, Shape shape) {
  Array<T> y = x.value();
  try {
    y.reshape(std::move(shape));
  } catch (const ShapeError& e) {
    throw ShapeError(std::string("reshape: ") + e.what());
  }
  return x.graph->make_node("reshape", std::move(y), {x.id}, [x = x.id](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const Array<T>& gy = g.grad_ref(self);
    Array<T>& gx = g.grad_ref(x);
    for (size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
  });
}

template <typename T>
Var<T> slice_cols(Var<T> x, int start, int len) {
  const Array<T>& xv = x.value();
  if (xv.rank() != 2 || start < 0 || len < 0 || start + len > xv.dim(1)) {
    throw ShapeError("slice_cols: [" + std::to_string(start) + ", " + std::to_string(start + len) +
                     ") invalid for shape " + shape_str(xv.shape()));
  }
  const int rows = xv.dim(0), cols = xv.dim(1);
  Array<T> y({rows, len});
  for (int r = 0; r < rows; ++r) {
    std::copy_n(xv.data() + static_cast<size_t>(r) * cols + start, len, y.data() + static_cast<size_t>(r) * len);
  }
  return x.graph->make_node("slice_cols", std::move(y), {x.id}, [x = x.id, rows, cols, start, len](Graph<T>& g, int self) {
    if (!g.requires_grad(x)) return;
    const Array<T>& gy = g.grad_ref(self);
    Array<T>& gx = g.grad_ref(x);
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < len; ++k) gx[static_cast<size_t>(r) * cols + start + k] += gy[static_cast<size_t>(r) * len + k];
    }
  });
}

template <typename T>
Var<T> mul_rows(Var<T> x, Var<T> s) {
  const Array<T>& xv = x.value();
  const Array<T>& sv = s.value();
  if (xv.rank() != 2 || sv.size() != static_cast<size_t>(xv.dim(0))) {
    throw ShapeError("mul_rows: incompatible shapes " + shape_str(xv.shape()) + " and " + shape_str(sv.shape()));
  }
  const int rows = xv.dim(0), cols = xv.dim(1);
  Array<T> y(xv.shape());
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) y[static_cast<size_t>(r) * cols + k] = xv[static_cast<size_t>(r) * cols + k] * sv[static_cast<size_t>(r)];
  }
  return x.graph->make_node("mul_rows", std::move(y), {x.id, s.id}, [x = x.id, s = s.id, rows, cols](Graph<T>& g, int self) {
    const Array<T>& gy = g.grad_ref(self);
    const Array<T>& xv = g.value(x);
    const Array<T>& sv = g.value(s);
    if (g.requires_grad(x)) {
      Array<T>& gx = g.grad_ref(x);
      for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < cols; ++k) gx[static_cast<size_t>(r) * cols + k] += gy[static_cast<size_t>(r) * cols + k] * sv[static_cast<size_t>(r)];
      }
    }
    if (g.requires_grad(s)) {
      Array<T>& gs = g.grad_ref(s);
      for (int r = 0; r < rows; ++r) {
        T acc = T(0);
        for (int k = 0; k < cols; ++k) acc += gy[static_cast<size_t>(r) * cols + k] * xv[static_cast<size_t>(r) * cols + k];
        gs[static_cast<size_t>(r)] += acc;
      }
    }
  });
}

template <typename T>
Var<T> bce_mean(Var<T> a, const Array<T>& targets, T clip) {
  const Array<T>& av = a.value();
  if (targets.size() != av.size()) {
    throw ShapeError("bce_mean: predictions " + shape_str(av.shape()) + " vs targets " + shape_str(targets.shape()));
  }
  const T n = static_cast<T>(av.size());
  T total = T(0);
  for (size_t i = 0; i < av.size(); ++i) {
    const T p = std::clamp(av[i], clip, T(1) - clip);
    total -= targets[i] * std::log(p) + (T(1) - targets[i]) * std::log(T(1) - p);
  }
  return a.graph->make_node("bce_mean", Array<T>::scalar(total / n), {a.id},
                            [a = a.id, targets, clip, n](Graph<T>& g, int self) {
                              if (!g.requires_grad(a)) return;
                              const T gy = g.grad_ref(self)[0];
                              const Array<T>& av = g.value(a);
                              Array<T>& ga = g.grad_ref(a);
                              for (size_t i = 0; i < av.size(); ++i) {
                                const T p = av[i];
                                if (p < clip || p > T(1) - clip) continue;
                                ga[i] += gy * (-(targets[i] / p) + (T(1) - targets[i]) / (T(1) - p)) / n;
                              }
                            });
}

#define SEQTAB_INSTANTIATE_OPS(T)                                             \
  template Var<T> matmul<T>(Var<T>, Var<T>);                                  \
  template Var<T> bilinear<T>(Var<T>, Var<T>, Var<T>);                        \
  template Var<T> relu<T>(Var<T>);                                            \
  template Var<T> sigmoid<T>(Var<T>);                                         \
  template Var<T> tanh<T>(Var<T>);                                            \
  template Var<T> softmax<T>(Var<T>, int);                                    \
  template Var<T> sum<T>(Var<T>, int);                                        \
  template Var<T> sum_all<T>(Var<T>);                                         \
  template Var<T> add<T>(Var<T>, Var<T>);                                     \
  template Var<T> mul<T>(Var<T>, Var<T>);                                     \
  template Var<T> concat<T>(const std::vector<Var<T>>&, int);                 \
  template Var<T> embedding_lookup<T>(Var<T>, std::vector<int>);              \
  template Var<T> reshape<T>(Var<T>, Shape);                                  \
  template Var<T> slice_cols<T>(Var<T>, int, int);                            \
  template Var<T> mul_rows<T>(Var<T>, Var<T>);                                \
  template Var<T> bce_mean<T>(Var<T>, const Array<T>&, T);

SEQTAB_INSTANTIATE_OPS(float)
SEQTAB_INSTANTIATE_OPS(double)

}  // namespace ad

}  // namespace seqtab
