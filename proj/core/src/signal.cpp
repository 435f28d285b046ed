#include "steinmetz/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "steinmetz/errors.hpp"

namespace steinmetz::signal {

namespace {

constexpr double kResidueTolerance = 1e-9;

void require_even(std::size_t n, const char* what) {
  if (n == 0 || n % 2 != 0) {
    throw ContractError(std::string(what) + " requires an even, non-zero length; got " +
                        std::to_string(n));
  }
}

void require_finite(std::span<const double> z, const char* what) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) {
      throw DataError(std::string(what) + ": non-finite input at index " + std::to_string(i));
    }
  }
}

std::vector<double> apply_multiplier(std::span<const double> z, const HilbertMultiplier& mult) {
  ComplexVector spectrum = dft(ComplexVector::from_real(z));
  for (std::size_t b = 0; b < spectrum.size(); ++b) {
    const std::complex<double> v = spectrum[b] * mult[b];
    spectrum.re[b] = v.real();
    spectrum.im[b] = v.imag();
  }
  ComplexVector out = idft(spectrum);

  double scale = 1.0;
  double residue = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    scale = std::max(scale, std::abs(z[i]));
    residue = std::max(residue, std::abs(out.im[i]));
  }
  if (residue > kResidueTolerance * scale) {
    throw ContractError("Hilbert transform left an imaginary residue of " +
                        std::to_string(residue));
  }
  return std::move(out.re);
}

}  // namespace

ComplexVector::ComplexVector(std::vector<double> re_part, std::vector<double> im_part)
    : re(std::move(re_part)), im(std::move(im_part)) {
  if (re.size() != im.size()) throw DimensionError("ComplexVector parts differ in length");
}

ComplexVector ComplexVector::from_real(std::span<const double> re_part) {
  return ComplexVector(std::vector<double>(re_part.begin(), re_part.end()),
                       std::vector<double>(re_part.size(), 0.0));
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

ComplexVector dft_direct(const ComplexVector& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  // Twiddles indexed by (b * t) mod n.
  std::vector<double> cos_table(n);
  std::vector<double> sin_table(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }
  ComplexVector out(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
  for (std::size_t b = 0; b < n; ++b) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    std::size_t j = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double c = cos_table[j];
      const double s = sin_table[j];
      acc_re += x.re[t] * c - x.im[t] * s;
      acc_im += x.re[t] * s + x.im[t] * c;
      j += b;
      if (j >= n) j -= n;
    }
    out.re[b] = acc_re;
    out.im[b] = acc_im;
  }
  if (inverse) {
    for (std::size_t b = 0; b < n; ++b) {
      out.re[b] /= static_cast<double>(n);
      out.im[b] /= static_cast<double>(n);
    }
  }
  return out;
}

ComplexVector fft_radix2(const ComplexVector& x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw ContractError("fft_radix2 requires a power-of-two length; got " + std::to_string(n));
  }
  std::vector<std::complex<double>> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = x[i];

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles are evaluated directly rather than by repeated multiplication
    // so the error does not grow with the stage length.
    std::vector<std::complex<double>> twiddle(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(len);
      twiddle[k] = {std::cos(angle), std::sin(angle)};
    }
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> u = a[start + k];
        const std::complex<double> v = a[start + k + half] * twiddle[k];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }

  ComplexVector out{std::vector<double>(n), std::vector<double>(n)};
  const double norm = inverse ? 1.0 / static_cast<double>(n) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.re[i] = a[i].real() * norm;
    out.im[i] = a[i].imag() * norm;
  }
  return out;
}

ComplexVector dft(const ComplexVector& x) {
  if (x.size() == 0) throw ContractError("dft of an empty sequence");
  return is_power_of_two(x.size()) ? fft_radix2(x, false) : dft_direct(x, false);
}

ComplexVector idft(const ComplexVector& spectrum) {
  if (spectrum.size() == 0) throw ContractError("idft of an empty sequence");
  return is_power_of_two(spectrum.size()) ? fft_radix2(spectrum, true)
                                          : dft_direct(spectrum, true);
}

HilbertMultiplier::HilbertMultiplier(std::size_t n) {
  require_even(n, "HilbertMultiplier");
  multipliers_.resize(n);
  const std::size_t half = n / 2;
  for (std::size_t b = 0; b < n; ++b) {
    if (b == 0 || b == half) {
      multipliers_[b] = {1.0, 0.0};
    } else if (b < half) {
      multipliers_[b] = {0.0, -1.0};
    } else {
      multipliers_[b] = {0.0, 1.0};
    }
  }
}

HilbertMultiplier HilbertMultiplier::conjugated() const {
  HilbertMultiplier out;
  out.multipliers_.reserve(multipliers_.size());
  for (auto m : multipliers_) out.multipliers_.push_back(std::conj(m));
  return out;
}

std::vector<double> hilbert_freq(std::span<const double> z) {
  require_even(z.size(), "hilbert_freq");
  require_finite(z, "hilbert_freq");
  return apply_multiplier(z, HilbertMultiplier(z.size()));
}

std::vector<double> hilbert_freq_transpose(std::span<const double> z) {
  require_even(z.size(), "hilbert_freq_transpose");
  require_finite(z, "hilbert_freq_transpose");
  return apply_multiplier(z, HilbertMultiplier(z.size()).conjugated());
}

std::vector<double> dht_cotangent(std::span<const double> x) {
  const std::size_t n = x.size();
  require_even(n, "dht_cotangent");
  require_finite(x, "dht_cotangent");
  std::vector<double> out(n, 0.0);
  const double step = std::numbers::pi / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t u = (t + 1) % 2; u < n; u += 2) {
      const double angle = (static_cast<double>(t) - static_cast<double>(u)) * step;
      acc += x[u] / std::tan(angle);
    }
    out[t] = 2.0 * acc / static_cast<double>(n);
  }
  return out;
}

ComplexVector analytic_signal(std::span<const double> x) {
  std::vector<double> h = hilbert_freq(x);
  return ComplexVector(std::vector<double>(x.begin(), x.end()), std::move(h));
}

}  // namespace steinmetz::signal
