#include "steinmetz/losses.hpp"

#include <cmath>
#include <string>

#include "steinmetz/errors.hpp"

namespace steinmetz {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ContractError("learning_rate must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ContractError("beta must be non-negative");
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  if (!(adam_b1 > 0.0 && adam_b1 < 1.0)) throw ContractError("adam_b1 must lie in (0, 1)");
  if (!(adam_b2 > 0.0 && adam_b2 < 1.0)) throw ContractError("adam_b2 must lie in (0, 1)");
  if (!(adam_eps > 0.0)) throw ContractError("adam_eps must be positive");
}

Var cross_entropy_loss(Var logits, std::span<const std::uint32_t> labels) {
  return cross_entropy(logits, labels);
}

Var mse_loss(Var pred, Var target) { return mse(pred, target); }

Var hilbert_penalty(const LatentVars& latent) {
  const std::size_t width = latent.re.value().cols();
  if (width % 2 != 0) {
    throw ContractError("hilbert_penalty needs an even latent width; got " + std::to_string(width));
  }
  return mse(hilbert_rows(latent.re), latent.im);
}

Var total_loss(Var task_loss, Var penalty, double beta) {
  if (!(beta >= 0.0)) throw ContractError("beta must be non-negative");
  return add(task_loss, scale(penalty, beta));
}

AdamState AdamState::for_params(const std::vector<NamedTensor>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.emplace_back(p.value.size(), 0.0);
    state.v.emplace_back(p.value.size(), 0.0);
  }
  return state;
}

AdamConfig AdamConfig::from(const TrainConfig& config) {
  return {config.learning_rate, config.adam_b1, config.adam_b2, config.adam_eps};
}

void adam_step(std::vector<Tensor>& params, std::span<const Tensor> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adam_step: parameter, gradient and state counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.b1, t);
  const double correction2 = 1.0 - std::pow(config.b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || state.m[i].size() != params[i].size()) {
      throw DimensionError("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
    std::vector<double> values = std::move(params[i]).release();
    const auto g = grads[i].data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = config.b1 * m[j] + (1.0 - config.b1) * g[j];
      v[j] = config.b2 * v[j] + (1.0 - config.b2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.eps);
    }
    params[i] = Tensor::adopt(grads[i].shape(), std::move(values));
  }
}

}  // namespace steinmetz
