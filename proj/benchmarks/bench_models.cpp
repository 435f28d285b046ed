#include <benchmark/benchmark.h>

#include "steinmetz/autodiff.hpp"
#include "steinmetz/losses.hpp"
#include "steinmetz/models.hpp"
#include "steinmetz/rng.hpp"

using namespace steinmetz;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return Tensor(std::move(shape), std::move(v));
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const Tensor a = random_tensor({32, n}, rng), b = random_tensor({n, 64}, rng);
  for (auto _ : state) {
    Tape t;
    benchmark::DoNotOptimize(matmul(t.constant(a), t.constant(b)).value());
  }
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(784);

// One training step's worth of work on a CV-MNIST sized batch.
void BM_ForwardBackward(benchmark::State& state) {
  const auto kind = static_cast<Architecture>(state.range(0));
  const NetworkSpec spec{kind, 784, 64, 10, Task::Classification};
  const Model model = init_params(spec, 0);
  Rng rng(4);
  const Tensor x_re = random_tensor({32, 784}, rng), x_im = random_tensor({32, 784}, rng);
  std::vector<std::uint32_t> labels(32);
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(10));
  for (auto _ : state) {
    Tape t;
    BoundParams params = bind(t, model);
    ForwardOutput out = forward(model, params, t.constant(x_re), t.constant(x_im));
    Var loss = cross_entropy_loss(out.pred, labels);
    if (kind == Architecture::Analytic) loss = total_loss(loss, hilbert_penalty(out.latent), 1e-3);
    t.backward(loss);
    benchmark::DoNotOptimize(params.vars.front().grad());
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_ForwardBackward)
    ->Arg(static_cast<int>(Architecture::RVNN))
    ->Arg(static_cast<int>(Architecture::CVNN))
    ->Arg(static_cast<int>(Architecture::Steinmetz))
    ->Arg(static_cast<int>(Architecture::Analytic));

}  // namespace
