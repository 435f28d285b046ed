#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"
#include "steinmetz/signal.hpp"

using namespace steinmetz;
using namespace steinmetz::signal;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> cos_grid(std::size_t n, double cycles = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * kPi * cycles * i / n);
  return x;
}

std::vector<double> sin_grid(std::size_t n, double cycles = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * kPi * cycles * i / n);
  return x;
}

ComplexVector random_complex(std::size_t n, Rng& rng) {
  ComplexVector x{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    x.re[i] = rng.normal();
    x.im[i] = rng.normal();
  }
  return x;
}

/// Random real signal with the DC and Nyquist bins removed.
std::vector<double> random_zero_dc_nyquist(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  double mean = 0.0, alt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += x[i];
    alt += (i % 2 == 0 ? 1.0 : -1.0) * x[i];
  }
  mean /= n;
  alt /= n;
  for (std::size_t i = 0; i < n; ++i) x[i] -= mean + (i % 2 == 0 ? 1.0 : -1.0) * alt;
  return x;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Dft, ZeroAndImpulse) {
  ComplexVector zero = dft(ComplexVector::from_real(std::vector<double>(8, 0.0)));
  for (std::size_t b = 0; b < 8; ++b) EXPECT_EQ(zero[b], std::complex<double>(0, 0));
  std::vector<double> delta(8, 0.0);
  delta[0] = 1.0;
  ComplexVector ones = dft(ComplexVector::from_real(delta));
  for (std::size_t b = 0; b < 8; ++b) {
    EXPECT_NEAR(ones.re[b], 1.0, 1e-15);
    EXPECT_NEAR(ones.im[b], 0.0, 1e-15);
  }
}

TEST(Dft, FourPointExample) {
  // Direct summation by hand: X[b] = sum_n x[n] (-i)^(b n).
  const std::vector<std::complex<double>> expected{{10, 0}, {-2, 2}, {-2, 0}, {-2, -2}};
  for (bool direct : {false, true}) {
    std::vector<double> x{1, 2, 3, 4};
    ComplexVector X = direct ? dft_direct(ComplexVector::from_real(x)) : dft(ComplexVector::from_real(x));
    for (std::size_t b = 0; b < 4; ++b) {
      EXPECT_NEAR(X.re[b], expected[b].real(), 1e-12);
      EXPECT_NEAR(X.im[b], expected[b].imag(), 1e-12);
    }
  }
}

TEST(Dft, InverseExamples) {
  ComplexVector X({10, -2, -2, -2}, {0, 2, 0, -2});
  ComplexVector x = idft(X);
  const double expected[] = {1, 2, 3, 4};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(x.re[i], expected[i], 1e-12);
    EXPECT_NEAR(x.im[i], 0.0, 1e-12);
  }
  ComplexVector impulse = idft(ComplexVector(std::vector<double>(8, 1.0), std::vector<double>(8, 0.0)));
  EXPECT_NEAR(impulse.re[0], 1.0, 1e-15);
  for (std::size_t i = 1; i < 8; ++i) EXPECT_NEAR(impulse.re[i], 0.0, 1e-15);
}

TEST(Dft, RoundTripRandom) {
  Rng rng(1);
  for (std::size_t n : {16u, 12u, 10u}) {
    ComplexVector x = random_complex(n, rng);
    ComplexVector y = idft(dft(x));
    EXPECT_LT(max_abs_diff(x.re, y.re), 1e-12);
    EXPECT_LT(max_abs_diff(x.im, y.im), 1e-12);
  }
}

TEST(Dft, FftMatchesDirectForPowersOfTwo) {
  Rng rng(2);
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    ComplexVector x = random_complex(n, rng);
    ComplexVector fast = fft_radix2(x);
    ComplexVector slow = dft_direct(x);
    double scale = 0.0, err = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      scale = std::max(scale, std::abs(slow[b]));
      err = std::max(err, std::abs(fast[b] - slow[b]));
    }
    EXPECT_LE(err, 1e-9 * scale) << "n=" << n;
  }
}

TEST(Dft, ParsevalHolds) {
  Rng rng(3);
  for (std::size_t n : {8u, 16u, 64u, 256u, 6u}) {
    ComplexVector x = random_complex(n, rng);
    ComplexVector X = dft(x);
    double time = 0.0, freq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      time += std::norm(x[i]);
      freq += std::norm(X[i]);
    }
    EXPECT_NEAR(time, freq / n, 1e-9 * time);
  }
}

TEST(Dft, Radix2RejectsOtherLengths) {
  EXPECT_THROW(fft_radix2(ComplexVector::from_real(std::vector<double>(6, 1.0))), ContractError);
}

TEST(HilbertFreq, CosineToSine) {
  std::vector<double> h = hilbert_freq(cos_grid(8));
  EXPECT_LT(max_abs_diff(h, sin_grid(8)), 1e-12);
  for (std::size_t n : {16u, 64u, 256u}) {
    EXPECT_LT(max_abs_diff(hilbert_freq(cos_grid(n, 3)), sin_grid(n, 3)), 1e-9);
  }
}

TEST(HilbertFreq, ConstantPassesThrough) {
  std::vector<double> h = hilbert_freq(std::vector<double>(8, 2.5));
  for (double v : h) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(HilbertFreq, SpectralMultiplier) {
  Rng rng(4);
  const std::size_t n = 16;
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  ComplexVector X = dft(ComplexVector::from_real(x));
  ComplexVector H = dft(ComplexVector::from_real(hilbert_freq(x)));
  HilbertMultiplier mult(n);
  for (std::size_t b = 0; b < n; ++b) {
    EXPECT_LT(std::abs(H[b] - mult[b] * X[b]), 1e-12);
  }
  EXPECT_EQ(mult[0], std::complex<double>(1, 0));
  EXPECT_EQ(mult[n / 2], std::complex<double>(1, 0));
  EXPECT_EQ(mult[1], std::complex<double>(0, -1));
  EXPECT_EQ(mult[n - 1], std::complex<double>(0, 1));
}

TEST(HilbertFreq, AntiInvolutionEnergyAndOrthogonality) {
  Rng rng(5);
  for (std::size_t n : {8u, 16u, 64u, 256u}) {
    std::vector<double> z = random_zero_dc_nyquist(n, rng);
    std::vector<double> h = hilbert_freq(z);
    std::vector<double> hh = hilbert_freq(h);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(-hh[i], z[i], 1e-9);
    EXPECT_NEAR(norm2(h), norm2(z), 1e-9 * norm2(z));
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += z[i] * h[i];
    EXPECT_LE(std::abs(dot), 1e-9 * norm2(z));
  }
}

TEST(HilbertFreq, TransposeIsAdjoint) {
  Rng rng(6);
  const std::size_t n = 32;
  std::vector<double> x(n), y(n);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  std::vector<double> hx = hilbert_freq(x);
  std::vector<double> hty = hilbert_freq_transpose(y);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lhs += hx[i] * y[i];
    rhs += x[i] * hty[i];
  }
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(HilbertFreq, Errors) {
  EXPECT_THROW(hilbert_freq(std::vector<double>(7, 1.0)), ContractError);
  EXPECT_THROW(dht_cotangent(std::vector<double>(5, 1.0)), ContractError);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hilbert_freq(bad), DataError);
  EXPECT_THROW(analytic_signal(bad), DataError);
}

TEST(HilbertFreq, NonPowerOfTwoEvenLength) {
  EXPECT_LT(max_abs_diff(hilbert_freq(cos_grid(12)), sin_grid(12)), 1e-12);
}

TEST(DhtCotangent, Examples) {
  for (double v : dht_cotangent(std::vector<double>(8, 0.0))) EXPECT_EQ(v, 0.0);
  EXPECT_LT(max_abs_diff(dht_cotangent(cos_grid(8)), sin_grid(8)), 1e-12);
}

TEST(DhtCotangent, AnnihilatesDc) {
  for (double v : dht_cotangent(std::vector<double>(8, 3.0))) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(DhtCotangent, MatchesFrequencyDomainOffDcNyquist) {
  Rng rng(7);
  for (std::size_t n : {8u, 16u, 64u, 256u}) {
    std::vector<double> z = random_zero_dc_nyquist(n, rng);
    std::vector<double> a = dht_cotangent(z);
    std::vector<double> b = hilbert_freq(z);
    EXPECT_LE(max_abs_diff(a, b), 1e-9 * std::sqrt(norm2(b)));
  }
}

TEST(AnalyticSignal, CosineBecomesExponential) {
  ComplexVector z = analytic_signal(cos_grid(16));
  for (std::size_t i = 0; i < 16; ++i) {
    const std::complex<double> expected = std::polar(1.0, 2 * kPi * i / 16);
    EXPECT_LT(std::abs(z[i] - expected), 1e-12);
  }
  ComplexVector zero = analytic_signal(std::vector<double>(8, 0.0));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(std::abs(zero[i]), 0.0);
}

TEST(AnalyticSignal, PartsAreOrthogonal) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = random_zero_dc_nyquist(64, rng);
    ComplexVector z = analytic_signal(x);
    double dot = 0.0;
    for (std::size_t i = 0; i < 64; ++i) dot += z.re[i] * z.im[i];
    EXPECT_LE(std::abs(dot), 1e-9 * norm2(x));
  }
}
