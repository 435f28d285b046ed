#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace steinmetz {

/// Dense row-major tensor of 64-bit floats.
///
/// Tensors are immutable once built. Every public constructor rejects
/// non-finite entries and shapes whose element count disagrees with the
/// buffer. Rank-2 tensors are the workhorse ([batch x features] and weight
/// matrices); rank-1 tensors hold biases and plain vectors.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor filled(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> data);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  /// Wraps a buffer produced by an internal kernel. Finiteness is only
  /// checked in debug builds; the shape/size contract is always checked.
  static Tensor adopt(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  /// Leading dimension of a rank-2 tensor.
  std::size_t rows() const;
  /// Trailing dimension of a rank-2 tensor.
  std::size_t cols() const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const;
  double operator[](std::size_t i) const { return data_[i]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }
  double item() const;

  /// Moves the buffer out; the tensor is left empty.
  std::vector<double> release() &&;

  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);
std::string shape_string(const std::vector<std::size_t>& shape);

/// Bitwise equality of shape and contents.
bool bitwise_equal(const Tensor& a, const Tensor& b);

}  // namespace steinmetz
