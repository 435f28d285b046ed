#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "steinmetz/dataset.hpp"

namespace steinmetz {

/// Nonlinear channel: FIR filter, memoryless quadratic nonlinearity and
/// additive circular white Gaussian noise at a fixed SNR.
struct ChannelSpec {
  double rho = std::numbers::sqrt2 / 2.0;
  std::vector<std::complex<double>> taps = {
      {0.432, 0.297}, {0.349, -0.074}, {0.202, 0.166}, {0.112, 0.094}, {0.051, 0.036}};
  std::complex<double> nl_coeff{0.15, 0.10};
  double snr_db = 5.0;
  std::size_t seq_len = 5;

  void validate() const;
};

/// Generates M input windows x = sqrt(1 - rho^2) a + i rho b (a, b standard
/// normal sequences) of length seq_len, most recent sample first, and their
/// k = 1 complex channel outputs y = t + c t^2 + noise where t is the FIR
/// output. Noise is rescaled so the realized SNR over the set is exactly snr_db.
Dataset gen_channel_dataset(const ChannelSpec& spec, std::size_t m, std::uint64_t seed);

/// 10 log10(P_signal / P_noise) from clean and noisy complex outputs.
double measured_snr_db(std::span<const std::complex<double>> clean,
                       std::span<const std::complex<double>> noisy);

/// Noise-free channel response to one window (most recent sample first).
std::complex<double> channel_response(const ChannelSpec& spec,
                                      std::span<const std::complex<double>> window);

}  // namespace steinmetz
