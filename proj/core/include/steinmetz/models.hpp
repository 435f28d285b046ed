#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "steinmetz/autodiff.hpp"
#include "steinmetz/tensor.hpp"

namespace steinmetz {

enum class Architecture { RVNN, CVNN, Steinmetz, Analytic };
enum class Task { Classification, ComplexRegression };

std::string_view to_string(Architecture kind);
std::string_view to_string(Task task);
/// Case-insensitive; throws ContractError on unknown names.
Architecture parse_architecture(std::string_view name);
Task parse_task(std::string_view name);

/// Layer widths and task of one network: input_dim dN, latent_dim lN and
/// output_dim k (classes, or complex outputs for regression).
struct NetworkSpec {
  Architecture kind = Architecture::Steinmetz;
  std::size_t input_dim = 0;
  std::size_t latent_dim = 0;
  std::size_t output_dim = 0;
  Task task = Task::Classification;

  /// Throws ContractError for zero widths or an odd latent width.
  void validate() const;

  /// Real width of the prediction: k logits, or the stacked [Re; Im] 2k vector.
  std::size_t output_width() const;

  bool operator==(const NetworkSpec&) const = default;
};

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// A network's spec plus its parameters, in declared layer order.
class Model {
 public:
  Model(NetworkSpec spec, std::vector<NamedTensor> params);

  const NetworkSpec& spec() const noexcept { return spec_; }
  const std::vector<NamedTensor>& params() const noexcept { return params_; }
  const Tensor& param(std::string_view name) const;
  std::size_t parameter_count() const;

  /// Replaces all parameter values; shapes must match.
  void set_values(std::vector<Tensor> values);

 private:
  NetworkSpec spec_;
  std::vector<NamedTensor> params_;
};

/// Names and shapes of every parameter of `spec`, in declared layer order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_layout(const NetworkSpec& spec);

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
Model init_params(const NetworkSpec& spec, std::uint64_t seed);

/// Model with every parameter set to zero.
Model zero_params(const NetworkSpec& spec);

/// Parameters placed on a tape as variables, in declared order.
struct BoundParams {
  std::vector<std::string> names;
  std::vector<Var> vars;

  Var operator[](std::string_view name) const;
};

BoundParams bind(Tape& tape, const Model& model);

/// Latent real/imaginary views. For Steinmetz/Analytic these are the
/// mean-centered Z_R and Z_I; for RVNN the two halves of the 2lN latent;
/// for CVNN the real and imaginary parts after the second CReLU.
struct LatentVars {
  Var re;
  Var im;
};

struct ForwardOutput {
  Var pred;
  LatentVars latent;
};

ForwardOutput steinmetz_forward(const Model& model, const BoundParams& params, Var x_re, Var x_im);
ForwardOutput rvnn_forward(const Model& model, const BoundParams& params, Var x_re, Var x_im);
ForwardOutput cvnn_forward(const Model& model, const BoundParams& params, Var x_re, Var x_im);

/// Dispatches on the model's architecture.
ForwardOutput forward(const Model& model, const BoundParams& params, Var x_re, Var x_im);

/// Epsilon under the square root of the CVNN magnitude head.
inline constexpr double kMagnitudeEpsilon = 1e-12;

}  // namespace steinmetz
