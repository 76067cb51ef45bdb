#include "seqtab/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "seqtab/kernels.hpp"

namespace seqtab {

template <typename T>
LstmParams<T>::LstmParams(const std::string& prefix, int input_dim, int hidden)
    : wx(prefix + ".wx", Array<T>({input_dim, 4 * hidden})),
      wh(prefix + ".wh", Array<T>({hidden, 4 * hidden})),
      b(prefix + ".b", Array<T>({1, 4 * hidden})),
      h0(prefix + ".h0", Array<T>({1, hidden})),
      c0(prefix + ".c0", Array<T>({1, hidden})) {}

template <typename T>
void LstmParams<T>::init(UniformInit& init, double scale) {
  init.fill(wx.value, scale);
  init.fill(wh.value, scale);
  init.fill(b.value, scale);
  h0.value.fill(T(0));
  c0.value.fill(T(0));
}

template <typename T>
LstmVars<T> bind(Graph<T>& g, LstmParams<T>& p) {
  return {g.param(p.wx), g.param(p.wh), g.param(p.b), g.param(p.h0), g.param(p.c0)};
}

template <typename T>
std::pair<Var<T>, Var<T>> lstm_cell(Var<T> x, Var<T> h_prev, Var<T> c_prev, const LstmVars<T>& p) {
  const int d = p.wh.value().dim(0);
  Var<T> z = ad::add(ad::add(ad::matmul(x, p.wx), ad::matmul(h_prev, p.wh)), p.b);
  Var<T> i = ad::sigmoid(ad::slice_cols(z, 0, d));
  Var<T> f = ad::sigmoid(ad::slice_cols(z, d, d));
  Var<T> g = ad::tanh(ad::slice_cols(z, 2 * d, d));
  Var<T> o = ad::sigmoid(ad::slice_cols(z, 3 * d, d));
  Var<T> c = ad::add(ad::mul(f, c_prev), ad::mul(i, g));
  Var<T> h = ad::mul(o, ad::tanh(c));
  return {h, c};
}

template <typename T>
Var<T> lstm_encode(Var<T> embedding, const std::vector<int>& ids, const LstmVars<T>& p) {
  Var<T> h = p.h0;
  Var<T> c = p.c0;
  for (int id : ids) {
    Var<T> x = ad::embedding_lookup(embedding, {id});
    std::tie(h, c) = lstm_cell(x, h, c, p);
  }
  return h;
}

namespace {

// Saved activations of one time step over the active prefix of the batch.
template <typename T>
struct LstmStep {
  int active = 0;
  std::vector<T> gates;   // active x 4d, after nonlinearity
  std::vector<T> h_prev;  // active x d
  std::vector<T> c_prev;  // active x d
  std::vector<T> tanh_c;  // active x d
};

template <typename T>
struct LstmTape {
  std::vector<int> order;             // batch row -> sequence index, longest first
  std::vector<std::vector<int>> ids;  // in batch-row order
  std::vector<LstmStep<T>> steps;
};

}  // namespace

template <typename T>
Var<T> lstm_encode_batch(Var<T> embedding, const std::vector<std::vector<int>>& sequences, const LstmVars<T>& p) {
  const Array<T>& emb = embedding.value();
  const Array<T>& wx = p.wx.value();
  const Array<T>& wh = p.wh.value();
  const Array<T>& bias = p.b.value();
  if (emb.rank() != 2 || wx.rank() != 2 || emb.dim(1) != wx.dim(0)) {
    throw ShapeError("lstm_encode_batch: embedding " + shape_str(emb.shape()) + " vs wx " + shape_str(wx.shape()));
  }
  const int e = emb.dim(1);
  const int d = wh.dim(0);
  const int d4 = 4 * d;
  if (wx.dim(1) != d4 || wh.dim(1) != d4 || bias.size() != static_cast<size_t>(d4) ||
      p.h0.value().size() != static_cast<size_t>(d) || p.c0.value().size() != static_cast<size_t>(d)) {
    throw ShapeError("lstm_encode_batch: inconsistent LSTM parameter shapes wx " + shape_str(wx.shape()) + ", wh " +
                     shape_str(wh.shape()));
  }
  const int batch = static_cast<int>(sequences.size());
  const int vocab = emb.dim(0);

  auto tape = std::make_shared<LstmTape<T>>();
  tape->order.resize(static_cast<size_t>(batch));
  std::iota(tape->order.begin(), tape->order.end(), 0);
  std::stable_sort(tape->order.begin(), tape->order.end(),
                   [&](int a, int b) { return sequences[static_cast<size_t>(a)].size() > sequences[static_cast<size_t>(b)].size(); });
  for (int s : tape->order) {
    for (int id : sequences[static_cast<size_t>(s)]) {
      if (id < 0 || id >= vocab) {
        throw ShapeError("lstm_encode_batch: index " + std::to_string(id) + " out of range for embedding " +
                         shape_str(emb.shape()));
      }
    }
    tape->ids.push_back(sequences[static_cast<size_t>(s)]);
  }
  const int max_len = batch > 0 ? static_cast<int>(tape->ids[0].size()) : 0;

  std::vector<T> h(static_cast<size_t>(batch) * d), c(static_cast<size_t>(batch) * d);
  for (int r = 0; r < batch; ++r) {
    std::copy_n(p.h0.value().data(), d, h.data() + static_cast<size_t>(r) * d);
    std::copy_n(p.c0.value().data(), d, c.data() + static_cast<size_t>(r) * d);
  }
  std::vector<T> x;
  for (int t = 0; t < max_len; ++t) {
    int n = 0;
    while (n < batch && static_cast<int>(tape->ids[static_cast<size_t>(n)].size()) > t) ++n;
    LstmStep<T> st;
    st.active = n;
    st.h_prev.assign(h.begin(), h.begin() + static_cast<long>(n) * d);
    st.c_prev.assign(c.begin(), c.begin() + static_cast<long>(n) * d);
    x.resize(static_cast<size_t>(n) * e);
    for (int r = 0; r < n; ++r) {
      const int id = tape->ids[static_cast<size_t>(r)][static_cast<size_t>(t)];
      std::copy_n(emb.data() + static_cast<size_t>(id) * e, e, x.data() + static_cast<size_t>(r) * e);
    }
    st.gates.resize(static_cast<size_t>(n) * d4);
    for (int r = 0; r < n; ++r) std::copy_n(bias.data(), d4, st.gates.data() + static_cast<size_t>(r) * d4);
    kernels::gemm<T>(false, false, n, d4, e, T(1), x.data(), e, wx.data(), d4, T(1), st.gates.data(), d4);
    kernels::gemm<T>(false, false, n, d4, d, T(1), st.h_prev.data(), d, wh.data(), d4, T(1), st.gates.data(), d4);
    kernels::lstm_gates<T>(n, d, st.gates.data());
    st.tanh_c.resize(static_cast<size_t>(n) * d);
    for (int r = 0; r < n; ++r) {
      const T* gr = st.gates.data() + static_cast<size_t>(r) * d4;
      for (int k = 0; k < d; ++k) {
        const size_t idx = static_cast<size_t>(r) * d + k;
        const T cv = gr[d + k] * st.c_prev[idx] + gr[k] * gr[2 * d + k];
        c[idx] = cv;
        st.tanh_c[idx] = std::tanh(cv);
        h[idx] = gr[3 * d + k] * st.tanh_c[idx];
      }
    }
    tape->steps.push_back(std::move(st));
  }

  Array<T> out({batch, d});
  for (int r = 0; r < batch; ++r) {
    const int s = tape->order[static_cast<size_t>(r)];
    std::copy_n(h.data() + static_cast<size_t>(r) * d, d, out.data() + static_cast<size_t>(s) * d);
  }

  const std::vector<int> parents = {embedding.id, p.wx.id, p.wh.id, p.b.id, p.h0.id, p.c0.id};
  return embedding.graph->make_node(
      "lstm_encode_batch", std::move(out), parents, [tape, parents, batch, d, e](Graph<T>& g, int self) {
        const int d4 = 4 * d;
        const int emb_id = parents[0], wx_id = parents[1], wh_id = parents[2], b_id = parents[3];
        const int h0_id = parents[4], c0_id = parents[5];
        const Array<T>& gout = g.grad_ref(self);
        const Array<T>& emb = g.value(emb_id);
        const Array<T>& wx = g.value(wx_id);
        const Array<T>& wh = g.value(wh_id);
        std::vector<T> dh(static_cast<size_t>(batch) * d), dc(static_cast<size_t>(batch) * d, T(0));
        for (int r = 0; r < batch; ++r) {
          const int s = tape->order[static_cast<size_t>(r)];
          std::copy_n(gout.data() + static_cast<size_t>(s) * d, d, dh.data() + static_cast<size_t>(r) * d);
        }
        std::vector<T> dz, x, dx, dh_prev;
        for (int t = static_cast<int>(tape->steps.size()) - 1; t >= 0; --t) {
          const LstmStep<T>& st = tape->steps[static_cast<size_t>(t)];
          const int n = st.active;
          dz.assign(static_cast<size_t>(n) * d4, T(0));
          for (int r = 0; r < n; ++r) {
            const T* gr = st.gates.data() + static_cast<size_t>(r) * d4;
            T* dzr = dz.data() + static_cast<size_t>(r) * d4;
            for (int k = 0; k < d; ++k) {
              const size_t idx = static_cast<size_t>(r) * d + k;
              const T ig = gr[k], fg = gr[d + k], gg = gr[2 * d + k], og = gr[3 * d + k];
              const T tc = st.tanh_c[idx];
              const T dhv = dh[idx];
              const T dcv = dc[idx] + dhv * og * (T(1) - tc * tc);
              dzr[k] = dcv * gg * ig * (T(1) - ig);
              dzr[d + k] = dcv * st.c_prev[idx] * fg * (T(1) - fg);
              dzr[2 * d + k] = dcv * ig * (T(1) - gg * gg);
              dzr[3 * d + k] = dhv * tc * og * (T(1) - og);
              dc[idx] = dcv * fg;
            }
          }
          const bool need_x = g.requires_grad(wx_id) || g.requires_grad(emb_id);
          if (need_x) {
            x.resize(static_cast<size_t>(n) * e);
            for (int r = 0; r < n; ++r) {
              const int id = tape->ids[static_cast<size_t>(r)][static_cast<size_t>(t)];
              std::copy_n(emb.data() + static_cast<size_t>(id) * e, e, x.data() + static_cast<size_t>(r) * e);
            }
          }
          if (g.requires_grad(wx_id)) {
            Array<T>& gwx = g.grad_ref(wx_id);
            kernels::gemm<T>(true, false, e, d4, n, T(1), x.data(), e, dz.data(), d4, T(1), gwx.data(), d4);
          }
          if (g.requires_grad(wh_id)) {
            Array<T>& gwh = g.grad_ref(wh_id);
            kernels::gemm<T>(true, false, d, d4, n, T(1), st.h_prev.data(), d, dz.data(), d4, T(1), gwh.data(), d4);
          }
          if (g.requires_grad(b_id)) {
            Array<T>& gb = g.grad_ref(b_id);
            for (int r = 0; r < n; ++r) {
              for (int k = 0; k < d4; ++k) gb[static_cast<size_t>(k)] += dz[static_cast<size_t>(r) * d4 + k];
            }
          }
          if (g.requires_grad(emb_id)) {
            dx.assign(static_cast<size_t>(n) * e, T(0));
            kernels::gemm<T>(false, true, n, e, d4, T(1), dz.data(), d4, wx.data(), d4, T(0), dx.data(), e);
            Array<T>& gemb = g.grad_ref(emb_id);
            for (int r = 0; r < n; ++r) {
              const int id = tape->ids[static_cast<size_t>(r)][static_cast<size_t>(t)];
              T* dst = gemb.data() + static_cast<size_t>(id) * e;
              for (int k = 0; k < e; ++k) dst[k] += dx[static_cast<size_t>(r) * e + k];
            }
          }
          dh_prev.assign(static_cast<size_t>(n) * d, T(0));
          kernels::gemm<T>(false, true, n, d, d4, T(1), dz.data(), d4, wh.data(), d4, T(0), dh_prev.data(), d);
          std::copy(dh_prev.begin(), dh_prev.end(), dh.begin());
        }
        if (g.requires_grad(h0_id)) {
          Array<T>& gh0 = g.grad_ref(h0_id);
          for (int r = 0; r < batch; ++r) {
            for (int k = 0; k < d; ++k) gh0[static_cast<size_t>(k)] += dh[static_cast<size_t>(r) * d + k];
          }
        }
        if (g.requires_grad(c0_id)) {
          Array<T>& gc0 = g.grad_ref(c0_id);
          for (int r = 0; r < batch; ++r) {
            for (int k = 0; k < d; ++k) gc0[static_cast<size_t>(k)] += dc[static_cast<size_t>(r) * d + k];
          }
        }
      });
}

template struct LstmParams<float>;
template struct LstmParams<double>;
template LstmVars<float> bind<float>(Graph<float>&, LstmParams<float>&);
template LstmVars<double> bind<double>(Graph<double>&, LstmParams<double>&);
template std::pair<Var<float>, Var<float>> lstm_cell<float>(Var<float>, Var<float>, Var<float>, const LstmVars<float>&);
template std::pair<Var<double>, Var<double>> lstm_cell<double>(Var<double>, Var<double>, Var<double>,
                                                               const LstmVars<double>&);
template Var<float> lstm_encode<float>(Var<float>, const std::vector<int>&, const LstmVars<float>&);
template Var<double> lstm_encode<double>(Var<double>, const std::vector<int>&, const LstmVars<double>&);
template Var<float> lstm_encode_batch<float>(Var<float>, const std::vector<std::vector<int>>&, const LstmVars<float>&);
template Var<double> lstm_encode_batch<double>(Var<double>, const std::vector<std::vector<int>>&,
                                               const LstmVars<double>&);

}  // namespace seqtab
