#pragma once

#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqtab/tensor.hpp"

namespace seqtab {

template <typename T>
class Graph;

// Handle to a node of a Graph.
template <typename T>
struct Var {
  Graph<T>* graph = nullptr;
  int id = -1;

  bool valid() const { return graph != nullptr && id >= 0; }
  const Array<T>& value() const { return graph->value(id); }
  const Shape& shape() const { return value().shape(); }
  size_t size() const { return value().size(); }
};

// Tape for reverse-mode differentiation. Nodes are appended in topological
// order; backward() walks them in reverse. A Graph is confined to one thread.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var<T> constant(Array<T> value);
  // Leaf that receives a gradient stored in the graph (see grad()).
  Var<T> variable(Array<T> value);
  // Leaf bound to a parameter; its gradient accumulates into p.grad. The
  // same parameter always maps to the same node.
  Var<T> param(Parameter<T>& p);

  Var<T> make_node(std::string op, Array<T> value, std::vector<int> parents, BackwardFn backward);

  const Array<T>& value(int id) const;
  const std::string& op(int id) const { return nodes_.at(static_cast<size_t>(id)).op; }
  const std::vector<int>& parents(int id) const { return nodes_.at(static_cast<size_t>(id)).parents; }
  bool requires_grad(int id) const { return nodes_.at(static_cast<size_t>(id)).requires_grad; }
  size_t size() const { return nodes_.size(); }

  // Gradient buffer of a node, allocated on first use.
  Array<T>& grad_ref(int id);
  // Gradient of a node after backward(); zeros if none reached it.
  Array<T> grad(Var<T> v) const;

  // Seeds d loss / d loss = 1 and propagates. Throws ShapeError if the loss
  // is not a single element.
  void backward(Var<T> loss);

 private:
  struct Node {
    std::string op;
    Array<T> value;
    const Array<T>* value_ref = nullptr;
    Array<T> grad;
    Array<T>* grad_ext = nullptr;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<int> parents;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter<T>*, int> param_ids_;
};

namespace ad {

// All ops throw ShapeError naming the op and the offending shapes.

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b);
// x^T W y for vectors x (n), y (m) and W (n x m); result has shape {1}.
template <typename T>
Var<T> bilinear(Var<T> x, Var<T> w, Var<T> y);
template <typename T>
Var<T> relu(Var<T> x);
template <typename T>
Var<T> sigmoid(Var<T> x);
template <typename T>
Var<T> tanh(Var<T> x);
template <typename T>
Var<T> softmax(Var<T> x, int axis);
// Reduces one axis away.
template <typename T>
Var<T> sum(Var<T> x, int axis);
template <typename T>
Var<T> sum_all(Var<T> x);
// Elementwise with equal shapes, or b broadcast over a's leading axis
// (b.shape == a.shape[1:] or {1} + a.shape[1:]).
template <typename T>
Var<T> add(Var<T> a, Var<T> b);
template <typename T>
Var<T> mul(Var<T> a, Var<T> b);
template <typename T>
Var<T> concat(const std::vector<Var<T>>& parts, int axis);
// Rows of a 2-D table selected by index; gradient scatters back.
template <typename T>
Var<T> embedding_lookup(Var<T> table, std::vector<int> indices);
template <typename T>
Var<T> reshape(Var<T> x, Shape shape);
// Columns [start, start + len) of a 2-D array.
template <typename T>
Var<T> slice_cols(Var<T> x, int start, int len);
// x (n x m) scaled row-wise by s (n x 1 or n).
template <typename T>
Var<T> mul_rows(Var<T> x, Var<T> s);
// Mean binary cross-entropy of probabilities a against 0/1 targets, with a
// clipped to [clip, 1 - clip].
template <typename T>
Var<T> bce_mean(Var<T> a, const Array<T>& targets, T clip = T(1e-7));

}  // namespace ad

}  // namespace seqtab
