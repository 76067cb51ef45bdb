#pragma once

// Dense kernels used by the autodiff engine. Every kernel has an OpenMP
// version (seqtab::kernels) and a plain serial reference
// (seqtab::kernels::serial) kept for testing and benchmarking. Both sum in
// the same order, so for a fixed input they agree to the last bit unless
// the compiler contracts differently.

namespace seqtab::kernels {

// C = alpha * op(A) * op(B) + beta * C, row-major. op(A) is m x k, op(B) is
// k x n, C is m x n. lda/ldb/ldc are row strides of the stored matrices.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc);

// out[i] = sum_j x[i*n + j] * y[i*n + j] for i < m (row-wise dot products).
template <typename T>
void rowwise_dot(int m, int n, const T* x, const T* y, T* out);

// LSTM gate nonlinearity over an m x 4d pre-activation block laid out as
// [input | forget | candidate | output]; sigmoid on i/f/o, tanh on g. In place.
template <typename T>
void lstm_gates(int m, int d, T* z);

// Number of threads the parallel kernels will use.
int max_threads();

namespace serial {

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc);

template <typename T>
void rowwise_dot(int m, int n, const T* x, const T* y, T* out);

template <typename T>
void lstm_gates(int m, int d, T* z);

}  // namespace serial

}  // namespace seqtab::kernels
