#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steinmetz/autodiff.hpp"
#include "steinmetz/models.hpp"
#include "steinmetz/tensor.hpp"

namespace steinmetz {

/// Training hyperparameters. Defaults follow the CV-MNIST row of the
/// hyperparameter table (learning rate and penalty weight 1e-3) with the
/// usual Adam moments.
struct TrainConfig {
  double learning_rate = 1e-3;
  double beta = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double adam_b1 = 0.9;
  double adam_b2 = 0.999;
  double adam_eps = 1e-8;

  /// Throws ContractError naming the first invalid field.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

/// Batch-mean softmax cross-entropy of logits against class ids.
Var cross_entropy_loss(Var logits, std::span<const std::uint32_t> labels);

/// Mean squared error over all entries.
Var mse_loss(Var pred, Var target);

/// Hilbert consistency penalty: batch mean of the per-sample MSE between
/// hilbert(z_re) and z_im. Zero exactly when every z_im row is the Hilbert
/// transform of the matching z_re row. The gradient reaches both latents.
Var hilbert_penalty(const LatentVars& latent);

/// task + beta * penalty.
Var total_loss(Var task_loss, Var penalty, double beta);

/// Adam first/second moments and step count for a parameter list.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;

  static AdamState for_params(const std::vector<NamedTensor>& params);
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double b1 = 0.9;
  double b2 = 0.999;
  double eps = 1e-8;

  static AdamConfig from(const TrainConfig& config);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::vector<Tensor>& params, std::span<const Tensor> grads, AdamState& state,
               const AdamConfig& config);

}  // namespace steinmetz
