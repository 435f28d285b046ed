#include "steinmetz/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"

namespace steinmetz {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_bias(const std::string& name) {
  return name.find(".bias") != std::string::npos;
}

void require_kind(const Model& model, bool ok, const char* fn) {
  if (!ok) {
    throw ContractError(std::string(fn) + " called on a " +
                        std::string(to_string(model.spec().kind)) + " model");
  }
}

void require_inputs(const NetworkSpec& spec, Var x_re, Var x_im) {
  const Tensor& re = x_re.value();
  const Tensor& im = x_im.value();
  if (re.rank() != 2 || !re.same_shape(im) || re.cols() != spec.input_dim) {
    throw DimensionError("network expects two [batch x " + std::to_string(spec.input_dim) +
                         "] inputs, got " + shape_string(re.shape()) + " and " +
                         shape_string(im.shape()));
  }
}

// (W_R + i W_I)(x_re + i x_im) + (b_R + i b_I)
std::pair<Var, Var> complex_linear(const BoundParams& p, const std::string& layer, Var x_re, Var x_im) {
  Var w_re = p[layer + ".weight_re"];
  Var w_im = p[layer + ".weight_im"];
  Var b_re = p[layer + ".bias_re"];
  Var b_im = p[layer + ".bias_im"];
  Var y_re = linear(x_re, w_re, b_re) - linear(x_im, w_im);
  Var y_im = linear(x_im, w_re, b_im) + linear(x_re, w_im);
  return {y_re, y_im};
}

}  // namespace

std::string_view to_string(Architecture kind) {
  switch (kind) {
    case Architecture::RVNN: return "RVNN";
    case Architecture::CVNN: return "CVNN";
    case Architecture::Steinmetz: return "Steinmetz";
    case Architecture::Analytic: return "Analytic";
  }
  return "?";
}

std::string_view to_string(Task task) {
  return task == Task::Classification ? "classification" : "complex_regression";
}

Architecture parse_architecture(std::string_view name) {
  const std::string n = lower(name);
  if (n == "rvnn") return Architecture::RVNN;
  if (n == "cvnn") return Architecture::CVNN;
  if (n == "steinmetz") return Architecture::Steinmetz;
  if (n == "analytic") return Architecture::Analytic;
  throw ContractError("unknown architecture '" + std::string(name) + "'");
}

Task parse_task(std::string_view name) {
  const std::string n = lower(name);
  if (n == "classification") return Task::Classification;
  if (n == "complex_regression" || n == "regression") return Task::ComplexRegression;
  throw ContractError("unknown task '" + std::string(name) + "'");
}

void NetworkSpec::validate() const {
  if (input_dim == 0) throw ContractError("input_dim must be positive");
  if (output_dim == 0) throw ContractError("output_dim must be positive");
  if (latent_dim == 0 || latent_dim % 2 != 0) {
    throw ContractError("latent_dim must be a positive even integer; got " + std::to_string(latent_dim));
  }
}

std::size_t NetworkSpec::output_width() const {
  return task == Task::Classification ? output_dim : 2 * output_dim;
}

Model::Model(NetworkSpec spec, std::vector<NamedTensor> params)
    : spec_(spec), params_(std::move(params)) {
  spec_.validate();
  const auto layout = parameter_layout(spec_);
  if (layout.size() != params_.size()) {
    throw DimensionError("model has " + std::to_string(params_.size()) + " parameters, layout expects " +
                         std::to_string(layout.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].first != params_[i].name || layout[i].second != params_[i].value.shape()) {
      throw DimensionError("parameter '" + params_[i].name + "' " +
                           shape_string(params_[i].value.shape()) + " does not match layout entry '" +
                           layout[i].first + "' " + shape_string(layout[i].second));
    }
  }
}

const Tensor& Model::param(std::string_view name) const {
  for (const auto& p : params_)
    if (p.name == name) return p.value;
  throw ContractError("no parameter named '" + std::string(name) + "'");
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void Model::set_values(std::vector<Tensor> values) {
  if (values.size() != params_.size()) throw DimensionError("set_values: parameter count differs");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].same_shape(params_[i].value)) {
      throw DimensionError("set_values: shape mismatch for '" + params_[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) params_[i].value = std::move(values[i]);
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_layout(const NetworkSpec& spec) {
  spec.validate();
  const std::size_t d = spec.input_dim, l = spec.latent_dim, out = spec.output_width();
  std::vector<std::pair<std::string, std::vector<std::size_t>>> layout;
  auto dense = [&](const std::string& name, std::size_t fan_out, std::size_t fan_in) {
    layout.push_back({name + ".weight", {fan_out, fan_in}});
    layout.push_back({name + ".bias", {fan_out}});
  };
  auto complex_dense = [&](const std::string& name, std::size_t fan_out, std::size_t fan_in) {
    layout.push_back({name + ".weight_re", {fan_out, fan_in}});
    layout.push_back({name + ".weight_im", {fan_out, fan_in}});
    layout.push_back({name + ".bias_re", {fan_out}});
    layout.push_back({name + ".bias_im", {fan_out}});
  };
  switch (spec.kind) {
    case Architecture::Steinmetz:
    case Architecture::Analytic:
      dense("realfc1", l, d);
      dense("realfc2", l, l);
      dense("imagfc1", l, d);
      dense("imagfc2", l, l);
      dense("regressor", out, 2 * l);
      break;
    case Architecture::RVNN:
      dense("fc1", l, 2 * d);
      dense("fc2", 2 * l, l);
      dense("fc3", out, 2 * l);
      break;
    case Architecture::CVNN:
      complex_dense("fc1", l, d);
      complex_dense("fc2", l, l);
      // The complex head emits k complex values; regression reshapes them to 2k reals.
      complex_dense("fc3", spec.output_dim, l);
      break;
  }
  return layout;
}

Model init_params(const NetworkSpec& spec, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "init");
  std::vector<NamedTensor> params;
  for (auto& [name, shape] : parameter_layout(spec)) {
    const std::size_t n = shape_product(shape);
    std::vector<double> data(n, 0.0);
    if (!is_bias(name)) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(shape[1]));
      for (double& v : data) v = rng.uniform(-bound, bound);
    }
    params.push_back({name, Tensor(shape, std::move(data))});
  }
  return Model(spec, std::move(params));
}

Model zero_params(const NetworkSpec& spec) {
  std::vector<NamedTensor> params;
  for (auto& [name, shape] : parameter_layout(spec)) params.push_back({name, Tensor::zeros(shape)});
  return Model(spec, std::move(params));
}

Var BoundParams::operator[](std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return vars[i];
  throw ContractError("no bound parameter named '" + std::string(name) + "'");
}

BoundParams bind(Tape& tape, const Model& model) {
  BoundParams bound;
  for (const auto& p : model.params()) {
    bound.names.push_back(p.name);
    bound.vars.push_back(tape.variable(p.value));
  }
  return bound;
}

ForwardOutput steinmetz_forward(const Model& model, const BoundParams& p, Var x_re, Var x_im) {
  const NetworkSpec& spec = model.spec();
  require_kind(model, spec.kind == Architecture::Steinmetz || spec.kind == Architecture::Analytic,
               "steinmetz_forward");
  require_inputs(spec, x_re, x_im);

  Var h_re = relu(linear(x_re, p["realfc1.weight"], p["realfc1.bias"]));
  Var z_re = mean_center_rows(relu(linear(h_re, p["realfc2.weight"], p["realfc2.bias"])));
  Var h_im = relu(linear(x_im, p["imagfc1.weight"], p["imagfc1.bias"]));
  Var z_im = mean_center_rows(relu(linear(h_im, p["imagfc2.weight"], p["imagfc2.bias"])));
  Var pred = linear(concat(z_re, z_im, 1), p["regressor.weight"], p["regressor.bias"]);
  return {pred, {z_re, z_im}};
}

ForwardOutput rvnn_forward(const Model& model, const BoundParams& p, Var x_re, Var x_im) {
  const NetworkSpec& spec = model.spec();
  require_kind(model, spec.kind == Architecture::RVNN, "rvnn_forward");
  require_inputs(spec, x_re, x_im);

  Var h = relu(linear(concat(x_re, x_im, 1), p["fc1.weight"], p["fc1.bias"]));
  Var latent = relu(linear(h, p["fc2.weight"], p["fc2.bias"]));
  Var pred = linear(latent, p["fc3.weight"], p["fc3.bias"]);
  auto [lat_re, lat_im] = split_cols(latent, spec.latent_dim);
  return {pred, {lat_re, lat_im}};
}

ForwardOutput cvnn_forward(const Model& model, const BoundParams& p, Var x_re, Var x_im) {
  const NetworkSpec& spec = model.spec();
  require_kind(model, spec.kind == Architecture::CVNN, "cvnn_forward");
  require_inputs(spec, x_re, x_im);

  auto [a_re, a_im] = complex_linear(p, "fc1", x_re, x_im);
  Var h_re = relu(a_re);
  Var h_im = relu(a_im);
  auto [b_re, b_im] = complex_linear(p, "fc2", h_re, h_im);
  Var z_re = relu(b_re);
  Var z_im = relu(b_im);
  auto [y_re, y_im] = complex_linear(p, "fc3", z_re, z_im);
  Var pred = spec.task == Task::Classification ? complex_magnitude(y_re, y_im, kMagnitudeEpsilon)
                                               : concat(y_re, y_im, 1);
  return {pred, {z_re, z_im}};
}

ForwardOutput forward(const Model& model, const BoundParams& params, Var x_re, Var x_im) {
  switch (model.spec().kind) {
    case Architecture::RVNN: return rvnn_forward(model, params, x_re, x_im);
    case Architecture::CVNN: return cvnn_forward(model, params, x_re, x_im);
    case Architecture::Steinmetz:
    case Architecture::Analytic: return steinmetz_forward(model, params, x_re, x_im);
  }
  throw ContractError("unknown architecture");
}

}  // namespace steinmetz
