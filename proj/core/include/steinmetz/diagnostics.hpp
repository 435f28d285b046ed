#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "steinmetz/tensor.hpp"

namespace steinmetz {

/// Percentage of rows whose argmax equals the label. Ties go to the lowest
/// class index.
double accuracy(const Tensor& logits, std::span<const std::uint32_t> labels);

/// Row argmax with ties broken toward the lowest index.
std::size_t argmax(std::span<const double> row);

/// Signed angle difference a - b wrapped to (-pi, pi].
double wrapped_angle_difference(double a, double b);

struct MagPhaseErrors {
  double magnitude_mse = 0.0;
  double phase_mse = 0.0;
  /// Complex predictions that were exactly zero; their phase is taken as 0.
  std::size_t degenerate_phase = 0;
};

/// Magnitude and wrapped-phase MSE between complex predictions and targets,
/// both laid out as [Re_0..Re_{k-1}, Im_0..Im_{k-1}] per row.
MagPhaseErrors mag_phase_mse(const Tensor& pred, const Tensor& target);

struct OrthogonalityResult {
  /// Mean of |<re, im>| / (|re| |im|) over rows with two nonzero halves.
  double mean = 0.0;
  std::size_t zero_rows = 0;
};

OrthogonalityResult latent_orthogonality(const Tensor& z_re, const Tensor& z_im);

/// Row-wise mixed norm (sum_i (sum_j |a_ij|^q)^(p/q))^(1/p); p, q >= 1.
double lpq_norm(const Tensor& matrix, double p, double q);

/// Sample covariance blocks (1/(n-1) normalization) of latent columns.
struct CovBlocks {
  Tensor k_rr;
  Tensor k_ii;
  Tensor k_ri;
};

CovBlocks covariance_blocks(const Tensor& z_re, const Tensor& z_im);

/// Full block matrix [[K_RR, K_RI], [K_RI^T, K_II]], optionally with the
/// cross blocks zeroed.
Tensor assemble_covariance(const CovBlocks& blocks, bool zero_cross);

struct CovarianceComparison {
  double norm_joint = 0.0;     // cross-covariance kept
  double norm_separate = 0.0;  // cross-covariance zeroed
  double ratio = 1.0;          // norm_joint / norm_separate
};

/// Throws DataError for fewer than two rows.
CovarianceComparison covariance_comparison(const Tensor& z_re, const Tensor& z_im, double p = 2.0,
                                           double q = 2.0);

}  // namespace steinmetz
