#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "steinmetz/models.hpp"
#include "steinmetz/tensor.hpp"

namespace steinmetz {

/// M complex feature rows of width dN plus labels.
///
/// Classification sets carry `labels` (class ids below k). Complex
/// regression sets carry `targets` [M x 2k], each row the stacked
/// [Re y_0..Re y_{k-1}, Im y_0..Im y_{k-1}].
/// A "real form" set has only meaningful real features (imaginary part zero);
/// it is the input to dft_encode.
struct Dataset {
  Tensor features_re;
  Tensor features_im;
  Task task = Task::Classification;
  std::size_t k = 0;
  std::vector<std::uint32_t> labels;
  Tensor targets;
  std::string provenance;
  bool real_form = false;

  std::size_t size() const { return features_re.rows(); }
  std::size_t input_dim() const { return features_re.cols(); }

  /// Throws DataError naming the inconsistent field.
  void validate() const;

  /// First n rows.
  Dataset head(std::size_t n) const;
  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Copies the listed rows of a rank-2 tensor.
Tensor gather_rows(const Tensor& t, std::span<const std::size_t> rows);

/// Replaces every feature row by its DFT. Labels pass through.
Dataset dft_encode(const Dataset& real);

/// x + eta * w with w ~ CN(0, I): real and imaginary parts N(0, 1/2).
/// eta == 0 returns an identical copy.
Dataset add_complex_noise(const Dataset& ds, double eta, std::uint64_t seed);

/// CVDS directory: meta.json, features_re.bin, features_im.bin (omitted in
/// real form) and labels.bin, all little-endian.
Dataset load_cvds(const std::filesystem::path& dir);
void save_cvds(const Dataset& ds, const std::filesystem::path& dir);

bool bitwise_equal(const Dataset& a, const Dataset& b);

}  // namespace steinmetz
