#include "seqtab/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <vector>

namespace seqtab::kernels {

namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr long kParallelWork = 1L << 15;

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
inline void scale_row(T* row, int n, T beta) {
  if (beta == T(0)) {
    for (int j = 0; j < n; ++j) row[j] = T(0);
  } else if (beta != T(1)) {
    for (int j = 0; j < n; ++j) row[j] *= beta;
  }
}

// One output row: c[i, :] = alpha * op(A)[i, :] * op(B) + beta * c[i, :].
template <typename T>
inline void gemm_row(int i, bool trans_a, bool trans_b, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb,
                     T beta, T* c, int ldc) {
  T* crow = c + static_cast<long>(i) * ldc;
  if (trans_b) {
    for (int j = 0; j < n; ++j) {
      const T* brow = b + static_cast<long>(j) * ldb;
      T acc = T(0);
      for (int p = 0; p < k; ++p) {
        const T av = trans_a ? a[static_cast<long>(p) * lda + i] : a[static_cast<long>(i) * lda + p];
        acc += av * brow[p];
      }
      crow[j] = (beta == T(0) ? T(0) : beta * crow[j]) + alpha * acc;
    }
    return;
  }
  // Accumulate into a zeroed row so the summation order over p matches the
  // reference; then blend with beta.
  thread_local std::vector<T> acc;
  acc.assign(static_cast<size_t>(n), T(0));
  for (int p = 0; p < k; ++p) {
    const T av = trans_a ? a[static_cast<long>(p) * lda + i] : a[static_cast<long>(i) * lda + p];
    if (av == T(0)) continue;
    const T* brow = b + static_cast<long>(p) * ldb;
    T* accp = acc.data();
#pragma omp simd
    for (int j = 0; j < n; ++j) accp[j] += av * brow[j];
  }
  for (int j = 0; j < n; ++j) crow[j] = (beta == T(0) ? T(0) : beta * crow[j]) + alpha * acc[static_cast<size_t>(j)];
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc) {
  if (m <= 0 || n <= 0) return;
  if (k <= 0) {
    for (int i = 0; i < m; ++i) scale_row(c + static_cast<long>(i) * ldc, n, beta);
    return;
  }
  const long work = static_cast<long>(m) * n * k;
#pragma omp parallel for schedule(static) if (work > kParallelWork && m > 1)
  for (int i = 0; i < m; ++i) gemm_row(i, trans_a, trans_b, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

template <typename T>
void rowwise_dot(int m, int n, const T* x, const T* y, T* out) {
  const long work = static_cast<long>(m) * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < m; ++i) {
    const T* xr = x + static_cast<long>(i) * n;
    const T* yr = y + static_cast<long>(i) * n;
    T acc = T(0);
    for (int j = 0; j < n; ++j) acc += xr[j] * yr[j];
    out[i] = acc;
  }
}

template <typename T>
void lstm_gates(int m, int d, T* z) {
  const long work = static_cast<long>(m) * d * 4;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int i = 0; i < m; ++i) {
    T* row = z + static_cast<long>(i) * 4 * d;
    for (int j = 0; j < 2 * d; ++j) row[j] = sigmoid(row[j]);
    for (int j = 2 * d; j < 3 * d; ++j) row[j] = std::tanh(row[j]);
    for (int j = 3 * d; j < 4 * d; ++j) row[j] = sigmoid(row[j]);
  }
}

namespace serial {

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T acc = T(0);
      for (int p = 0; p < k; ++p) {
        const T av = trans_a ? a[static_cast<long>(p) * lda + i] : a[static_cast<long>(i) * lda + p];
        const T bv = trans_b ? b[static_cast<long>(j) * ldb + p] : b[static_cast<long>(p) * ldb + j];
        acc += av * bv;
      }
      T& cv = c[static_cast<long>(i) * ldc + j];
      cv = (beta == T(0) ? T(0) : beta * cv) + alpha * acc;
    }
  }
}

template <typename T>
void rowwise_dot(int m, int n, const T* x, const T* y, T* out) {
  for (int i = 0; i < m; ++i) {
    T acc = T(0);
    for (int j = 0; j < n; ++j) acc += x[static_cast<long>(i) * n + j] * y[static_cast<long>(i) * n + j];
    out[i] = acc;
  }
}

template <typename T>
void lstm_gates(int m, int d, T* z) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < 4 * d; ++j) {
      T& v = z[static_cast<long>(i) * 4 * d + j];
      v = (j >= 2 * d && j < 3 * d) ? std::tanh(v) : T(1) / (T(1) + std::exp(-v));
    }
  }
}

template void gemm<float>(bool, bool, int, int, int, float, const float*, int, const float*, int, float, float*, int);
template void gemm<double>(bool, bool, int, int, int, double, const double*, int, const double*, int, double, double*,
                           int);
template void rowwise_dot<float>(int, int, const float*, const float*, float*);
template void rowwise_dot<double>(int, int, const double*, const double*, double*);
template void lstm_gates<float>(int, int, float*);
template void lstm_gates<double>(int, int, double*);

}  // namespace serial

template void gemm<float>(bool, bool, int, int, int, float, const float*, int, const float*, int, float, float*, int);
template void gemm<double>(bool, bool, int, int, int, double, const double*, int, const double*, int, double, double*,
                           int);
template void rowwise_dot<float>(int, int, const float*, const float*, float*);
template void rowwise_dot<double>(int, int, const double*, const double*, double*);
template void lstm_gates<float>(int, int, float*);
template void lstm_gates<double>(int, int, double*);

}  // namespace seqtab::kernels
