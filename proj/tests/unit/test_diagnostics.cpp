#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "steinmetz/diagnostics.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/signal.hpp"
#include "test_support.hpp"

using namespace steinmetz;
using steinmetz::testing::random_tensor;

namespace {

constexpr double kPi = std::numbers::pi;

/// [Re | Im] row layout for k = 1.
Tensor polar_rows(std::initializer_list<std::pair<double, double>> mag_phase) {
  std::vector<double> d;
  for (auto [m, p] : mag_phase) {
    d.push_back(m * std::cos(p));
    d.push_back(m * std::sin(p));
  }
  return Tensor({mag_phase.size(), 2}, d);
}

Tensor scaled(const Tensor& t, double s) {
  std::vector<double> d(t.data().begin(), t.data().end());
  for (double& v : d) v *= s;
  return Tensor(t.shape(), d);
}

}  // namespace

TEST(Accuracy, Counting) {
  Tensor logits = Tensor::from_rows({{1, 0}, {0, 1}, {2, 1}, {0, 3}});
  const std::vector<std::uint32_t> all{0, 1, 0, 1}, none{1, 0, 1, 0}, three{0, 1, 0, 0};
  EXPECT_EQ(accuracy(logits, all), 100.0);
  EXPECT_EQ(accuracy(logits, none), 0.0);
  EXPECT_EQ(accuracy(logits, three), 75.0);
}

TEST(Accuracy, TiesGoToLowestIndexAndShiftInvariance) {
  const std::vector<double> tie{1.0, 3.0, 3.0};
  EXPECT_EQ(argmax(tie), 1u);
  Rng rng(1);
  Tensor logits = random_tensor({50, 4}, rng);
  std::vector<std::uint32_t> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(static_cast<std::uint32_t>(rng.below(4)));
  std::vector<double> shifted(logits.data().begin(), logits.data().end());
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t c = 0; c < 4; ++c) shifted[r * 4 + c] += 0.25 * static_cast<double>(r);
  EXPECT_EQ(accuracy(logits, labels), accuracy(Tensor({50, 4}, shifted), labels));
}

TEST(MagPhase, Examples) {
  Tensor target = polar_rows({{1.0, 0.3}, {2.0, -1.0}});
  MagPhaseErrors same = mag_phase_mse(target, target);
  EXPECT_EQ(same.magnitude_mse, 0.0);
  EXPECT_EQ(same.phase_mse, 0.0);

  MagPhaseErrors rotated = mag_phase_mse(polar_rows({{1.0, 0.3 + kPi / 2}, {2.0, -1.0 + kPi / 2}}), target);
  EXPECT_NEAR(rotated.magnitude_mse, 0.0, 1e-15);
  EXPECT_NEAR(rotated.phase_mse, (kPi / 2) * (kPi / 2), 1e-12);

  MagPhaseErrors wrap = mag_phase_mse(polar_rows({{1.0, kPi - 0.1}}), polar_rows({{1.0, -kPi + 0.1}}));
  EXPECT_NEAR(wrap.phase_mse, 0.04, 1e-12);
}

TEST(MagPhase, ZeroPredictionIsDegenerate) {
  MagPhaseErrors e = mag_phase_mse(Tensor::zeros({1, 2}), polar_rows({{1.0, 0.5}}));
  EXPECT_EQ(e.degenerate_phase, 1u);
  EXPECT_NEAR(e.phase_mse, 0.25, 1e-12);
  EXPECT_NEAR(e.magnitude_mse, 1.0, 1e-12);
}

TEST(MagPhase, WrappedDifferenceInvariantUnderFullTurns) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    const double d = wrapped_angle_difference(a, b);
    EXPECT_GT(d, -kPi);
    EXPECT_LE(d, kPi);
    EXPECT_NEAR(wrapped_angle_difference(a + 2 * kPi, b), d, 1e-9);
    EXPECT_NEAR(wrapped_angle_difference(a, b - 2 * kPi), d, 1e-9);
  }
}

TEST(MagPhase, ShapeMismatch) {
  EXPECT_THROW(mag_phase_mse(Tensor::zeros({2, 2}), Tensor::zeros({2, 4})), DimensionError);
  EXPECT_THROW(mag_phase_mse(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), ContractError);
}

TEST(Orthogonality, Examples) {
  Rng rng(3);
  Tensor re = random_tensor({8, 16}, rng);
  EXPECT_NEAR(latent_orthogonality(re, re).mean, 1.0, 1e-12);
  EXPECT_NEAR(latent_orthogonality(re, scaled(re, -1.0)).mean, 1.0, 1e-12);

  // Zero-mean, Nyquist-free rows and their Hilbert transforms.
  std::vector<double> rows, hil;
  for (std::size_t r = 0; r < 8; ++r) {
    std::vector<double> x(16);
    for (std::size_t i = 0; i < 16; ++i) x[i] = std::sin(2 * kPi * (r % 6 + 1) * i / 16.0 + r) + 0.3 * std::cos(2 * kPi * 3 * i / 16.0);
    auto h = signal::hilbert_freq(x);
    rows.insert(rows.end(), x.begin(), x.end());
    hil.insert(hil.end(), h.begin(), h.end());
  }
  EXPECT_LE(latent_orthogonality(Tensor({8, 16}, rows), Tensor({8, 16}, hil)).mean, 1e-9);
}

TEST(Orthogonality, ZeroRowsAreCountedAndScaleInvariant) {
  Rng rng(4);
  Tensor re = random_tensor({6, 4}, rng), im = random_tensor({6, 4}, rng);
  const double base = latent_orthogonality(re, im).mean;
  EXPECT_NEAR(latent_orthogonality(scaled(re, 3.0), scaled(im, 0.2)).mean, base, 1e-12);
  OrthogonalityResult zero = latent_orthogonality(Tensor::zeros({2, 4}), Tensor::from_rows({{1, 0, 0, 0}, {0, 0, 0, 0}}));
  EXPECT_EQ(zero.zero_rows, 2u);
  EXPECT_EQ(zero.mean, 0.0);
}

TEST(Lpq, Examples) {
  EXPECT_NEAR(lpq_norm(Tensor::from_rows({{1, 0}, {0, 1}}), 2, 2), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lpq_norm(Tensor::from_rows({{3, 4}, {0, 0}}), 2, 2), 5.0, 1e-15);
  EXPECT_NEAR(lpq_norm(Tensor::from_rows({{1, 1}, {1, 1}}), 1, 2), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_THROW(lpq_norm(Tensor::zeros({2, 2}), 0.5, 2), ContractError);
  EXPECT_THROW(lpq_norm(Tensor::zeros({2, 2}), 2, 0.9), ContractError);
}

TEST(Lpq, MonotoneUnderBlockZeroing) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = 1.0 + 3.0 * rng.uniform(), q = 1.0 + 3.0 * rng.uniform();
    Tensor a = random_tensor({6, 6}, rng);
    std::vector<double> z(a.data().begin(), a.data().end());
    const std::size_t r0 = rng.below(6), c0 = rng.below(6);
    for (std::size_t r = r0; r < 6; ++r)
      for (std::size_t c = c0; c < 6; ++c) z[r * 6 + c] = 0.0;
    EXPECT_GE(lpq_norm(a, p, q), lpq_norm(Tensor({6, 6}, z), p, q));
  }
}

TEST(Covariance, BlocksAndAssembly) {
  Tensor re = Tensor::from_rows({{1, 0}, {3, 2}});
  Tensor im = Tensor::from_rows({{0, 1}, {2, 1}});
  CovBlocks b = covariance_blocks(re, im);
  // Two samples: cov(x, y) = (x1 - x0)(y1 - y0) / 2.
  EXPECT_DOUBLE_EQ(b.k_rr(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(b.k_rr(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(b.k_ii(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(b.k_ii(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(b.k_ri(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(b.k_ri(1, 1), 0.0);
  Tensor joint = assemble_covariance(b, false);
  Tensor sep = assemble_covariance(b, true);
  EXPECT_EQ(joint.rows(), 4u);
  EXPECT_EQ(joint(0, 2), b.k_ri(0, 0));
  EXPECT_EQ(joint(2, 0), b.k_ri(0, 0));
  EXPECT_EQ(sep(0, 2), 0.0);
  EXPECT_EQ(sep(3, 3), b.k_ii(1, 1));
  EXPECT_THROW(covariance_blocks(Tensor::zeros({1, 2}), Tensor::zeros({1, 2})), DataError);
}

TEST(Covariance, JointNormDominates) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor re = random_tensor({30, 6}, rng), im = random_tensor({30, 6}, rng);
    CovarianceComparison c = covariance_comparison(re, im, 1.0 + rng.uniform(), 1.0 + rng.uniform());
    EXPECT_GE(c.norm_joint, c.norm_separate);
  }
  Tensor re = random_tensor({50, 4}, rng);
  CovarianceComparison same = covariance_comparison(re, re);
  EXPECT_GT(same.norm_joint, same.norm_separate);
}

TEST(Covariance, IndependentLatentsGiveRatioNearOne) {
  Rng rng(7);
  Tensor re = random_tensor({10000, 8}, rng), im = random_tensor({10000, 8}, rng);
  EXPECT_NEAR(covariance_comparison(re, im).ratio, 1.0, 0.05);
}
