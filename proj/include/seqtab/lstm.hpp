#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seqtab/graph.hpp"

namespace seqtab {

// Gate layout along the 4d axis is [input | forget | candidate | output].
template <typename T>
struct LstmParams {
  Parameter<T> wx;  // in x 4d
  Parameter<T> wh;  // d x 4d
  Parameter<T> b;   // 1 x 4d
  Parameter<T> h0;  // 1 x d, learned, starts at zero
  Parameter<T> c0;  // 1 x d, learned, starts at zero

  LstmParams() = default;
  LstmParams(const std::string& prefix, int input_dim, int hidden);

  int input_dim() const { return wx.value.dim(0); }
  int hidden() const { return wh.value.dim(0); }
  void init(UniformInit& init, double scale);
  std::vector<Parameter<T>*> list() { return {&wx, &wh, &b, &h0, &c0}; }
};

template <typename T>
struct LstmVars {
  Var<T> wx, wh, b, h0, c0;
};

template <typename T>
LstmVars<T> bind(Graph<T>& g, LstmParams<T>& p);

// One step on row vectors: x (1 x in), h and c (1 x d).
template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Var<T> x, Var<T> h_prev, Var<T> c_prev, const LstmVars<T>& p);

// Final hidden state (1 x d) of the sequence of embedding rows, built from
// lstm_cell nodes. An empty sequence yields h0.
template <typename T>
Var<T> lstm_encode(Var<T> embedding, const std::vector<int>& ids, const LstmVars<T>& p);

// Same result as lstm_encode for every sequence at once (B x d), as a single
// fused node with its own backward pass through time.
template <typename T>
Var<T> lstm_encode_batch(Var<T> embedding, const std::vector<std::vector<int>>& sequences, const LstmVars<T>& p);

}  // namespace seqtab
