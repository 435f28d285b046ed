#include "steinmetz/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "steinmetz/errors.hpp"

namespace steinmetz {

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

double accuracy(const Tensor& logits, std::span<const std::uint32_t> labels) {
  if (logits.rank() != 2 || logits.rows() != labels.size()) {
    throw DimensionError("accuracy: " + shape_string(logits.shape()) + " logits for " +
                         std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < labels.size(); ++r)
    if (argmax(logits.row(r)) == labels[r]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

double wrapped_angle_difference(double a, double b) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(a - b, two_pi);
  if (d > std::numbers::pi) d -= two_pi;
  if (d <= -std::numbers::pi) d += two_pi;
  return d;
}

MagPhaseErrors mag_phase_mse(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target) || pred.rank() != 2 || pred.cols() % 2 != 0) {
    throw DimensionError("mag_phase_mse: expected matching [M x 2k] tensors, got " + shape_string(pred.shape()) +
                         " and " + shape_string(target.shape()));
  }
  const std::size_t rows = pred.rows(), k = pred.cols() / 2;
  MagPhaseErrors out;
  if (rows == 0) return out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::complex<double> yhat{pred(r, j), pred(r, k + j)};
      const std::complex<double> y{target(r, j), target(r, k + j)};
      const double dm = std::abs(yhat) - std::abs(y);
      out.magnitude_mse += dm * dm;
      double phase_hat = 0.0;
      if (yhat == std::complex<double>{}) {
        ++out.degenerate_phase;
      } else {
        phase_hat = std::arg(yhat);
      }
      const double phase = (y == std::complex<double>{}) ? 0.0 : std::arg(y);
      const double dp = wrapped_angle_difference(phase_hat, phase);
      out.phase_mse += dp * dp;
    }
  }
  const double n = static_cast<double>(rows * k);
  out.magnitude_mse /= n;
  out.phase_mse /= n;
  return out;
}

OrthogonalityResult latent_orthogonality(const Tensor& z_re, const Tensor& z_im) {
  if (!z_re.same_shape(z_im) || z_re.rank() != 2) {
    throw DimensionError("latent_orthogonality: latent shapes differ");
  }
  OrthogonalityResult out;
  std::size_t counted = 0;
  for (std::size_t r = 0; r < z_re.rows(); ++r) {
    const auto a = z_re.row(r);
    const auto b = z_im.row(r);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      dot += a[c] * b[c];
      na += a[c] * a[c];
      nb += b[c] * b[c];
    }
    if (na == 0.0 || nb == 0.0) {
      ++out.zero_rows;
      continue;
    }
    out.mean += std::abs(dot) / (std::sqrt(na) * std::sqrt(nb));
    ++counted;
  }
  if (counted > 0) out.mean /= static_cast<double>(counted);
  return out;
}

double lpq_norm(const Tensor& matrix, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw ContractError("lpq_norm requires p, q >= 1");
  if (matrix.rank() != 2) throw DimensionError("lpq_norm expects a matrix");
  double total = 0.0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    double row_sum = 0.0;
    for (double v : matrix.row(r)) row_sum += std::pow(std::abs(v), q);
    total += std::pow(row_sum, p / q);
  }
  return std::pow(total, 1.0 / p);
}

CovBlocks covariance_blocks(const Tensor& z_re, const Tensor& z_im) {
  if (!z_re.same_shape(z_im) || z_re.rank() != 2) throw DimensionError("covariance_blocks: latent shapes differ");
  const std::size_t n = z_re.rows(), d = z_re.cols();
  if (n < 2) throw DataError("covariance needs at least two samples; got " + std::to_string(n));

  auto centered = [&](const Tensor& z) {
    std::vector<double> mu(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) mu[c] += z(r, c);
    for (double& v : mu) v /= static_cast<double>(n);
    std::vector<double> out(n * d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) out[r * d + c] = z(r, c) - mu[c];
    return out;
  };
  const std::vector<double> a = centered(z_re);
  const std::vector<double> b = centered(z_im);

  auto cross = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> k(d * d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < d; ++i) {
        const double xi = x[r * d + i];
        for (std::size_t j = 0; j < d; ++j) k[i * d + j] += xi * y[r * d + j];
      }
    for (double& v : k) v /= static_cast<double>(n - 1);
    return Tensor({d, d}, std::move(k));
  };
  return {cross(a, a), cross(b, b), cross(a, b)};
}

Tensor assemble_covariance(const CovBlocks& blocks, bool zero_cross) {
  const std::size_t d = blocks.k_rr.rows();
  const std::size_t w = 2 * d;
  std::vector<double> full(w * w, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      full[i * w + j] = blocks.k_rr(i, j);
      full[(d + i) * w + d + j] = blocks.k_ii(i, j);
      if (!zero_cross) {
        full[i * w + d + j] = blocks.k_ri(i, j);
        full[(d + j) * w + i] = blocks.k_ri(i, j);
      }
    }
  }
  return Tensor({w, w}, std::move(full));
}

CovarianceComparison covariance_comparison(const Tensor& z_re, const Tensor& z_im, double p, double q) {
  const CovBlocks blocks = covariance_blocks(z_re, z_im);
  CovarianceComparison out;
  out.norm_joint = lpq_norm(assemble_covariance(blocks, false), p, q);
  out.norm_separate = lpq_norm(assemble_covariance(blocks, true), p, q);
  if (out.norm_separate > 0.0) {
    out.ratio = out.norm_joint / out.norm_separate;
  } else {
    out.ratio = out.norm_joint > 0.0 ? INFINITY : 1.0;
  }
  return out;
}

}  // namespace steinmetz
