#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace steinmetz::signal {

/// Complex sequence stored as parallel real/imaginary arrays.
struct ComplexVector {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVector() = default;
  ComplexVector(std::vector<double> re_part, std::vector<double> im_part);

  static ComplexVector from_real(std::span<const double> re_part);

  std::size_t size() const noexcept { return re.size(); }
  std::complex<double> operator[](std::size_t i) const { return {re[i], im[i]}; }
};

bool is_power_of_two(std::size_t n) noexcept;

/// Forward DFT, X[b] = sum_n x[n] exp(-i 2 pi b n / N). Radix-2 FFT for
/// power-of-two lengths, direct summation otherwise.
ComplexVector dft(const ComplexVector& x);

/// Inverse DFT with 1/N normalization.
ComplexVector idft(const ComplexVector& spectrum);

/// O(n^2) reference summation. `inverse` flips the kernel sign and applies 1/N.
ComplexVector dft_direct(const ComplexVector& x, bool inverse = false);

/// Iterative radix-2 FFT with bit-reversal permutation; natural-order output.
/// Length must be a power of two.
ComplexVector fft_radix2(const ComplexVector& x, bool inverse = false);

/// Spectral multiplier of the discrete Hilbert transform for even length n:
/// 1 at DC and Nyquist, -i on positive frequencies, +i on negative ones.
class HilbertMultiplier {
 public:
  explicit HilbertMultiplier(std::size_t n);

  std::size_t size() const noexcept { return multipliers_.size(); }
  std::complex<double> operator[](std::size_t b) const { return multipliers_[b]; }
  std::span<const std::complex<double>> values() const noexcept { return multipliers_; }

  /// Conjugated multiplier; realizes the transpose of the real Hilbert matrix.
  HilbertMultiplier conjugated() const;

 private:
  HilbertMultiplier() = default;
  std::vector<std::complex<double>> multipliers_;
};

/// Frequency-domain discrete Hilbert transform, Re(idft(m * dft(z))).
/// Throws ContractError for odd length and DataError for non-finite input.
std::vector<double> hilbert_freq(std::span<const double> z);

/// Transpose of the linear map realized by hilbert_freq (the backward pass).
std::vector<double> hilbert_freq_transpose(std::span<const double> z);

/// Time-domain cotangent-kernel DHT,
///   H[n] = (2/N) * sum_{u, u-n odd} x[u] * cot((n - u) * pi / N).
/// Annihilates DC and Nyquist; equals hilbert_freq on signals without them.
std::vector<double> dht_cotangent(std::span<const double> x);

/// (x, hilbert_freq(x)).
ComplexVector analytic_signal(std::span<const double> x);

}  // namespace steinmetz::signal
