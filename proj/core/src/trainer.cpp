#include "steinmetz/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "steinmetz/diagnostics.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"

namespace steinmetz {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) {
    throw ContractError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw ContractError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ContractError(std::string("field '") + key + "': " + e.what());
    }
  }
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void RunConfig::validate() const {
  network.validate();
  train.validate();
  if (train_path.empty()) throw ContractError("data.train must name a CVDS directory");
  if (!(noise_eta >= 0.0) || !std::isfinite(noise_eta)) {
    throw ContractError("data.noise_eta must be a finite value >= 0");
  }
  if (eval_batch_size == 0) throw ContractError("eval_batch_size must be positive");
}

json to_json(const NetworkSpec& spec) {
  return json{{"kind", std::string(to_string(spec.kind))},
              {"input_dim", spec.input_dim},
              {"latent_dim", spec.latent_dim},
              {"output_dim", spec.output_dim},
              {"task", std::string(to_string(spec.task))}};
}

NetworkSpec network_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "input_dim", "latent_dim", "output_dim", "task"}, "network");
  NetworkSpec spec;
  std::string kind = "Steinmetz";
  std::string task = "classification";
  read_opt(j, "kind", kind);
  read_opt(j, "task", task);
  spec.kind = parse_architecture(kind);
  spec.task = parse_task(task);
  read_opt(j, "input_dim", spec.input_dim);
  read_opt(j, "latent_dim", spec.latent_dim);
  read_opt(j, "output_dim", spec.output_dim);
  return spec;
}

json to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate}, {"beta", c.beta},       {"epochs", c.epochs},
              {"batch_size", c.batch_size},       {"seed", c.seed},       {"adam_b1", c.adam_b1},
              {"adam_b2", c.adam_b2},             {"adam_eps", c.adam_eps}};
}

TrainConfig train_config_from_json(const json& j) {
  reject_unknown_keys(
      j, {"learning_rate", "beta", "epochs", "batch_size", "seed", "adam_b1", "adam_b2", "adam_eps"},
      "train");
  TrainConfig c;
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "beta", c.beta);
  read_opt(j, "epochs", c.epochs);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "seed", c.seed);
  read_opt(j, "adam_b1", c.adam_b1);
  read_opt(j, "adam_b2", c.adam_b2);
  read_opt(j, "adam_eps", c.adam_eps);
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"network", to_json(c.network)},
              {"train", to_json(c.train)},
              {"data",
               {{"train", c.train_path},
                {"test", c.test_path.empty() ? json(nullptr) : json(c.test_path)},
                {"train_limit", c.train_limit},
                {"noise_eta", c.noise_eta},
                {"noise_test", c.noise_test}}},
              {"eval_every", c.eval_every},
              {"eval_batch_size", c.eval_batch_size}};
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j, {"network", "train", "data", "eval_every", "eval_batch_size"}, "config");
  RunConfig c;
  if (!j.contains("network")) throw ContractError("config is missing 'network'");
  c.network = network_spec_from_json(j.at("network"));
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  if (!j.contains("data")) throw ContractError("config is missing 'data'");
  const json& d = j.at("data");
  reject_unknown_keys(d, {"train", "test", "train_limit", "noise_eta", "noise_test"}, "data");
  read_opt(d, "train", c.train_path);
  read_opt(d, "test", c.test_path);
  read_opt(d, "train_limit", c.train_limit);
  read_opt(d, "noise_eta", c.noise_eta);
  read_opt(d, "noise_test", c.noise_test);
  read_opt(j, "eval_every", c.eval_every);
  read_opt(j, "eval_batch_size", c.eval_batch_size);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig c = run_config_from_json(j);
  // Relative data paths resolve against the config file's directory.
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (path.parent_path() / p).lexically_normal().string();
    }
  };
  resolve(c.train_path);
  resolve(c.test_path);
  return c;
}

double EvalMetrics::task_metric() const {
  return task == Task::Classification ? accuracy : mse;
}

json to_json(const EvalMetrics& m) {
  json j{{"samples", m.samples},
         {"hilbert_penalty", m.hilbert_penalty},
         {"orthogonality", m.orthogonality},
         {"zero_latent_rows", m.zero_latent_rows},
         {"norm_J", m.norm_joint},
         {"norm_S", m.norm_separate},
         {"norm_ratio", m.norm_ratio}};
  if (m.task == Task::Classification) {
    j["accuracy"] = m.accuracy;
  } else {
    j["mse"] = m.mse;
    j["mag_mse"] = m.magnitude_mse;
    j["phase_mse"] = m.phase_mse;
    j["degenerate_phase"] = m.degenerate_phase;
  }
  return j;
}

void check_compatible(const NetworkSpec& spec, const Dataset& data) {
  data.validate();
  if (data.input_dim() != spec.input_dim) {
    throw DataError("dataset feature width " + std::to_string(data.input_dim()) +
                    " does not match network input_dim " + std::to_string(spec.input_dim));
  }
  if (data.task != spec.task) {
    throw DataError("dataset task " + std::string(to_string(data.task)) +
                    " does not match network task " + std::string(to_string(spec.task)));
  }
  if (data.k != spec.output_dim) {
    throw DataError("dataset k=" + std::to_string(data.k) + " does not match network output_dim " +
                    std::to_string(spec.output_dim));
  }
}

namespace {

void append_rows(std::vector<double>& out, const Tensor& t) {
  out.insert(out.end(), t.data().begin(), t.data().end());
}

}  // namespace

ForwardPass run_forward(const Model& model, const Dataset& data, std::size_t batch_size) {
  check_compatible(model.spec(), data);
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  const std::size_t m = data.size();
  std::vector<double> pred, zre, zim;
  std::size_t pred_w = 0, lat_w = 0;
  for (std::size_t start = 0; start < m; start += batch_size) {
    const std::size_t end = std::min(m, start + batch_size);
    std::vector<std::size_t> rows(end - start);
    std::iota(rows.begin(), rows.end(), start);
    Tape tape;
    BoundParams params = bind(tape, model);
    Var x_re = tape.constant(gather_rows(data.features_re, rows));
    Var x_im = tape.constant(gather_rows(data.features_im, rows));
    ForwardOutput out = forward(model, params, x_re, x_im);
    pred_w = out.pred.value().cols();
    lat_w = out.latent.re.value().cols();
    append_rows(pred, out.pred.value());
    append_rows(zre, out.latent.re.value());
    append_rows(zim, out.latent.im.value());
  }
  return ForwardPass{Tensor::adopt({m, pred_w}, std::move(pred)),
                     Tensor::adopt({m, lat_w}, std::move(zre)),
                     Tensor::adopt({m, lat_w}, std::move(zim))};
}

EvalMetrics evaluate(const Model& model, const Dataset& data, std::size_t batch_size) {
  ForwardPass pass = run_forward(model, data, batch_size);
  EvalMetrics m;
  m.task = data.task;
  m.samples = data.size();
  if (data.task == Task::Classification) {
    m.accuracy = accuracy(pass.pred, data.labels);
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < pass.pred.size(); ++i) {
      const double d = pass.pred[i] - data.targets[i];
      acc += d * d;
    }
    m.mse = acc / static_cast<double>(pass.pred.size());
    MagPhaseErrors mp = mag_phase_mse(pass.pred, data.targets);
    m.magnitude_mse = mp.magnitude_mse;
    m.phase_mse = mp.phase_mse;
    m.degenerate_phase = mp.degenerate_phase;
  }
  {
    Tape tape;
    Var pen = hilbert_penalty({tape.constant(pass.latent_re), tape.constant(pass.latent_im)});
    m.hilbert_penalty = pen.value().item();
  }
  OrthogonalityResult orth = latent_orthogonality(pass.latent_re, pass.latent_im);
  m.orthogonality = orth.mean;
  m.zero_latent_rows = orth.zero_rows;
  if (data.size() >= 2) {
    CovarianceComparison cov = covariance_comparison(pass.latent_re, pass.latent_im);
    m.norm_joint = cov.norm_joint;
    m.norm_separate = cov.norm_separate;
    m.norm_ratio = cov.ratio;
  }
  return m;
}

json to_json(const RunReport& r, bool include_timing) {
  json epochs = json::array();
  for (const EpochRecord& e : r.epochs) {
    epochs.push_back(json{{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"penalty", optional_json(e.penalty)},
                          {"test_metric", optional_json(e.test_metric)}});
  }
  json j{{"config", to_json(r.config)},
         {"train_provenance", r.train_provenance},
         {"test_provenance", r.test_provenance},
         {"parameter_count", r.parameter_count},
         {"epochs", std::move(epochs)},
         {"final_train", to_json(r.final_train)},
         {"final_test", r.final_test ? to_json(*r.final_test) : json(nullptr)}};
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

TrainResult train_model(const RunConfig& config, const Dataset& train, const Dataset* test,
                        const EpochCallback& on_epoch) {
  config.network.validate();
  config.train.validate();
  check_compatible(config.network, train);
  if (test) check_compatible(config.network, *test);
  if (train.size() == 0) throw DataError("training set is empty");

  const auto t0 = std::chrono::steady_clock::now();
  const TrainConfig& tc = config.train;
  const bool analytic = config.network.kind == Architecture::Analytic;

  Model model = init_params(config.network, tc.seed);
  AdamState adam = AdamState::for_params(model.params());
  const AdamConfig adam_cfg = AdamConfig::from(tc);
  Rng shuffle_rng = Rng::substream(tc.seed, "shuffle");

  RunReport report;
  report.config = config;
  report.train_provenance = train.provenance;
  report.test_provenance = test ? test->provenance : std::string();
  report.parameter_count = model.parameter_count();

  const std::size_t m = train.size();
  std::vector<std::size_t> order(m);
  std::vector<Tensor> values;
  std::vector<Tensor> grads;
  std::vector<std::uint32_t> batch_labels;

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    double penalty_sum = 0.0;
    for (std::size_t start = 0; start < m; start += tc.batch_size) {
      const std::size_t end = std::min(m, start + tc.batch_size);
      std::span<const std::size_t> rows(order.data() + start, end - start);
      const double weight = static_cast<double>(rows.size());

      Tape tape;
      BoundParams params = bind(tape, model);
      Var x_re = tape.constant(gather_rows(train.features_re, rows));
      Var x_im = tape.constant(gather_rows(train.features_im, rows));
      ForwardOutput out = forward(model, params, x_re, x_im);

      Var task_loss;
      if (train.task == Task::Classification) {
        batch_labels.clear();
        for (std::size_t r : rows) batch_labels.push_back(train.labels[r]);
        task_loss = cross_entropy_loss(out.pred, batch_labels);
      } else {
        task_loss = mse_loss(out.pred, tape.constant(gather_rows(train.targets, rows)));
      }
      Var loss = task_loss;
      if (analytic) {
        Var pen = hilbert_penalty(out.latent);
        penalty_sum += pen.value().item() * weight;
        loss = total_loss(task_loss, pen, tc.beta);
      }
      loss_sum += loss.value().item() * weight;

      tape.backward(loss);
      values.clear();
      grads.clear();
      for (std::size_t i = 0; i < params.vars.size(); ++i) {
        values.push_back(model.params()[i].value);
        grads.push_back(params.vars[i].grad());
      }
      adam_step(values, grads, adam, adam_cfg);
      model.set_values(std::move(values));
      values = {};
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(m);
    if (analytic) rec.penalty = penalty_sum / static_cast<double>(m);
    const bool eval_now =
        test && (epoch == tc.epochs || (config.eval_every > 0 && epoch % config.eval_every == 0));
    if (eval_now) rec.test_metric = evaluate(model, *test, config.eval_batch_size).task_metric();
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  report.final_train = evaluate(model, train, config.eval_batch_size);
  if (test) report.final_test = evaluate(model, *test, config.eval_batch_size);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return TrainResult{std::move(model), std::move(report)};
}

PreparedData prepare_datasets(const RunConfig& config, Dataset train, std::optional<Dataset> test) {
  if (train.real_form) train = dft_encode(train);
  if (test && test->real_form) test = dft_encode(*test);
  if (config.train_limit > 0 && config.train_limit < train.size()) {
    train = train.head(config.train_limit);
  }
  if (config.noise_eta > 0.0) {
    train = add_complex_noise(train, config.noise_eta,
                              Rng::substream(config.train.seed, "train-noise").next_u64());
    if (test && config.noise_test) {
      test = add_complex_noise(*test, config.noise_eta,
                               Rng::substream(config.train.seed, "test-noise").next_u64());
    }
  }
  return PreparedData{std::move(train), std::move(test)};
}

PreparedData prepare_datasets(const RunConfig& config) {
  Dataset train = load_cvds(config.train_path);
  std::optional<Dataset> test;
  if (!config.test_path.empty()) test = load_cvds(config.test_path);
  return prepare_datasets(config, std::move(train), std::move(test));
}

RunReport run_training(const RunConfig& config, const std::filesystem::path& out_dir,
                       const EpochCallback& on_epoch) {
  config.validate();
  PreparedData data = prepare_datasets(config);
  TrainResult result = train_model(config, data.train, data.test ? &*data.test : nullptr, on_epoch);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  save_checkpoint(Checkpoint{result.model, config.train.seed, config.train.epochs},
                  out_dir / "model.ckpt");
  std::ofstream out(out_dir / "report.json");
  if (!out) throw DataError("cannot write " + (out_dir / "report.json").string());
  out << to_json(result.report).dump(2) << '\n';
  return result.report;
}

}  // namespace steinmetz
