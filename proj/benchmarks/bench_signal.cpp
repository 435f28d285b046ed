#include <benchmark/benchmark.h>

#include "steinmetz/rng.hpp"
#include "steinmetz/signal.hpp"

using namespace steinmetz;

namespace {

signal::ComplexVector random_complex(std::size_t n) {
  Rng rng(1);
  signal::ComplexVector x{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    x.re[i] = rng.normal();
    x.im[i] = rng.normal();
  }
  return x;
}

std::vector<double> random_real(std::size_t n) {
  Rng rng(2);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

void BM_FftRadix2(benchmark::State& state) {
  const auto x = random_complex(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(signal::fft_radix2(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FftRadix2)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNLogN);

void BM_DftDirect(benchmark::State& state) {
  const auto x = random_complex(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(signal::dft_direct(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DftDirect)->Arg(64)->Arg(256)->Arg(784)->Complexity(benchmark::oNSquared);

void BM_HilbertFreq(benchmark::State& state) {
  const auto x = random_real(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(signal::hilbert_freq(x));
}
BENCHMARK(BM_HilbertFreq)->Arg(64)->Arg(256)->Arg(784)->Arg(1024);

void BM_DhtCotangent(benchmark::State& state) {
  const auto x = random_real(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(signal::dht_cotangent(x));
}
BENCHMARK(BM_DhtCotangent)->Arg(64)->Arg(256)->Arg(784);

}  // namespace
