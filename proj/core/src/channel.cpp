#include "steinmetz/channel.hpp"

#include <cmath>
#include <string>

#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"

namespace steinmetz {

void ChannelSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ContractError("channel rho must lie in [0, 1]");
  if (taps.empty() || taps.size() > seq_len) {
    throw ContractError("channel needs between 1 and seq_len FIR taps");
  }
  bool any = false;
  for (auto t : taps) any = any || t != std::complex<double>{};
  if (!any) throw ContractError("channel taps are all zero");
  if (!std::isfinite(snr_db)) throw ContractError("channel snr_db must be finite");
  if (seq_len == 0) throw ContractError("channel seq_len must be positive");
}

std::complex<double> channel_response(const ChannelSpec& spec, std::span<const std::complex<double>> window) {
  std::complex<double> filtered{};
  for (std::size_t j = 0; j < spec.taps.size() && j < window.size(); ++j) filtered += spec.taps[j] * window[j];
  return filtered + spec.nl_coeff * filtered * filtered;
}

double measured_snr_db(std::span<const std::complex<double>> clean, std::span<const std::complex<double>> noisy) {
  if (clean.size() != noisy.size() || clean.empty()) throw DimensionError("measured_snr_db: size mismatch");
  double signal_power = 0.0, noise_power = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    signal_power += std::norm(clean[i]);
    noise_power += std::norm(noisy[i] - clean[i]);
  }
  return 10.0 * std::log10(signal_power / noise_power);
}

Dataset gen_channel_dataset(const ChannelSpec& spec, std::size_t m, std::uint64_t seed) {
  spec.validate();
  if (m == 0) throw ContractError("channel dataset needs M >= 1");
  const std::size_t n = spec.seq_len;
  const std::size_t length = m + n - 1;

  Rng input_rng = Rng::substream(seed, "channel-input");
  const double real_scale = std::sqrt(1.0 - spec.rho * spec.rho);
  std::vector<std::complex<double>> x(length);
  for (auto& v : x) {
    const double a = input_rng.normal();
    const double b = input_rng.normal();
    v = {real_scale * a, spec.rho * b};
  }

  std::vector<double> re(m * n), im(m * n);
  std::vector<std::complex<double>> clean(m);
  std::vector<std::complex<double>> window(n);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t newest = r + n - 1;
    for (std::size_t j = 0; j < n; ++j) {
      window[j] = x[newest - j];
      re[r * n + j] = window[j].real();
      im[r * n + j] = window[j].imag();
    }
    clean[r] = channel_response(spec, window);
  }

  double signal_power = 0.0;
  for (auto y : clean) signal_power += std::norm(y);
  signal_power /= static_cast<double>(m);

  Rng noise_rng = Rng::substream(seed, "channel-noise");
  std::vector<std::complex<double>> noise(m);
  double raw_power = 0.0;
  for (auto& w : noise) {
    const double a = noise_rng.normal();
    const double b = noise_rng.normal();
    w = {a, b};
    raw_power += std::norm(w);
  }
  raw_power /= static_cast<double>(m);
  const double target_power = signal_power / std::pow(10.0, spec.snr_db / 10.0);
  const double gain = std::sqrt(target_power / raw_power);

  std::vector<double> targets(2 * m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::complex<double> y = clean[r] + gain * noise[r];
    targets[2 * r] = y.real();
    targets[2 * r + 1] = y.imag();
  }

  Dataset ds;
  ds.features_re = Tensor({m, n}, std::move(re));
  ds.features_im = Tensor({m, n}, std::move(im));
  ds.task = Task::ComplexRegression;
  ds.k = 1;
  ds.targets = Tensor({m, 2}, std::move(targets));
  ds.provenance = "channel rho=" + std::to_string(spec.rho) + " snr_db=" + std::to_string(spec.snr_db) +
                  " M=" + std::to_string(m) + " seed=" + std::to_string(seed);
  return ds;
}

}  // namespace steinmetz
