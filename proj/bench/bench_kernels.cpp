#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "seqtab/kernels.hpp"

namespace k = seqtab::kernels;

namespace {

std::vector<float> random_vec(size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Square m x m times m x m; the LSTM input projection at d = 256 is the
// dominant shape during training.
template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto a = random_vec(static_cast<size_t>(m) * m, 1);
  const auto b = random_vec(static_cast<size_t>(m) * m, 2);
  std::vector<float> c(static_cast<size_t>(m) * m);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::gemm(false, false, m, m, m, 1.0f, a.data(), m, b.data(), m, 0.0f, c.data(), m);
    } else {
      k::serial::gemm(false, false, m, m, m, 1.0f, a.data(), m, b.data(), m, 0.0f, c.data(), m);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * m * m * m);
}

// Transposed-B variant used for weight gradients.
template <bool Parallel>
void BM_GemmTransB(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto a = random_vec(static_cast<size_t>(m) * m, 3);
  const auto b = random_vec(static_cast<size_t>(m) * m, 4);
  std::vector<float> c(static_cast<size_t>(m) * m);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::gemm(false, true, m, m, m, 1.0f, a.data(), m, b.data(), m, 0.0f, c.data(), m);
    } else {
      k::serial::gemm(false, true, m, m, m, 1.0f, a.data(), m, b.data(), m, 0.0f, c.data(), m);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * m * m * m);
}

template <bool Parallel>
void BM_RowwiseDot(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0)), n = 256;
  const auto x = random_vec(static_cast<size_t>(m) * n, 5);
  const auto y = random_vec(static_cast<size_t>(m) * n, 6);
  std::vector<float> out(static_cast<size_t>(m));
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::rowwise_dot(m, n, x.data(), y.data(), out.data());
    } else {
      k::serial::rowwise_dot(m, n, x.data(), y.data(), out.data());
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(m) * n);
}

// m rows of 4 x 256 gate pre-activations, one row per cell in a table batch.
template <bool Parallel>
void BM_LstmGates(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0)), d = 256;
  const auto z0 = random_vec(static_cast<size_t>(m) * 4 * d, 7);
  std::vector<float> z(z0.size());
  for (auto _ : state) {
    state.PauseTiming();
    z = z0;
    state.ResumeTiming();
    if constexpr (Parallel) {
      k::lstm_gates(m, d, z.data());
    } else {
      k::serial::lstm_gates(m, d, z.data());
    }
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(m) * 4 * d);
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Name("gemm/serial")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_Gemm<true>)->Name("gemm/openmp")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_GemmTransB<false>)->Name("gemm_tb/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmTransB<true>)->Name("gemm_tb/openmp")->Arg(64)->Arg(256);
BENCHMARK(BM_RowwiseDot<false>)->Name("rowwise_dot/serial")->Arg(64)->Arg(1024);
BENCHMARK(BM_RowwiseDot<true>)->Name("rowwise_dot/openmp")->Arg(64)->Arg(1024);
BENCHMARK(BM_LstmGates<false>)->Name("lstm_gates/serial")->Arg(16)->Arg(256);
BENCHMARK(BM_LstmGates<true>)->Name("lstm_gates/openmp")->Arg(16)->Arg(256);

BENCHMARK_MAIN();
