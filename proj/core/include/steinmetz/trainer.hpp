#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinmetz/checkpoint.hpp"
#include "steinmetz/dataset.hpp"
#include "steinmetz/losses.hpp"
#include "steinmetz/models.hpp"

namespace steinmetz {

/// Everything needed to reproduce one training run. Round-trips through
/// JSON; the RunReport echoes it verbatim.
struct RunConfig {
  NetworkSpec network;
  TrainConfig train;
  std::string train_path;
  std::string test_path;
  /// Use only the first N training rows (0 = all).
  std::size_t train_limit = 0;
  /// Additive CN(0, I) noise scale on the training features.
  double noise_eta = 0.0;
  /// Also corrupt the test features (with an independent noise stream).
  bool noise_test = false;
  /// Evaluate the test set every N epochs (0 = only after the last epoch).
  std::size_t eval_every = 1;
  /// Rows per forward pass during evaluation.
  std::size_t eval_batch_size = 500;

  /// Throws ContractError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected; missing optional keys take their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

struct EvalMetrics {
  Task task = Task::Classification;
  std::size_t samples = 0;
  double accuracy = 0.0;  // classification, percent
  double mse = 0.0;       // regression, over the 2k stacked reals
  double magnitude_mse = 0.0;
  double phase_mse = 0.0;
  std::size_t degenerate_phase = 0;
  double hilbert_penalty = 0.0;
  double orthogonality = 0.0;
  std::size_t zero_latent_rows = 0;
  double norm_joint = 0.0;
  double norm_separate = 0.0;
  double norm_ratio = 1.0;

  /// Accuracy for classification, MSE for regression.
  double task_metric() const;
};

nlohmann::json to_json(const EvalMetrics& metrics);

/// Latent views and predictions of a whole dataset, computed in batches.
struct ForwardPass {
  Tensor pred;
  Tensor latent_re;
  Tensor latent_im;
};

ForwardPass run_forward(const Model& model, const Dataset& data, std::size_t batch_size = 500);

/// Task metric plus structural diagnostics on `data`.
EvalMetrics evaluate(const Model& model, const Dataset& data, std::size_t batch_size = 500);

/// Throws DataError when the dataset does not fit the network.
void check_compatible(const NetworkSpec& spec, const Dataset& data);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  /// Mean Hilbert penalty over the epoch (Analytic networks only).
  std::optional<double> penalty;
  std::optional<double> test_metric;
};

struct RunReport {
  RunConfig config;
  std::string train_provenance;
  std::string test_provenance;
  std::size_t parameter_count = 0;
  std::vector<EpochRecord> epochs;
  std::optional<EvalMetrics> final_test;
  EvalMetrics final_train;
  double wall_clock_seconds = 0.0;
};

/// Report as JSON. `include_timing` = false drops the wall-clock field so
/// two reports of the same run compare byte-identical.
nlohmann::json to_json(const RunReport& report, bool include_timing = true);

struct TrainResult {
  Model model;
  RunReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains `config.network` on `train` (already noised/limited by the caller
/// or via prepare_datasets). All randomness derives from config.train.seed.
TrainResult train_model(const RunConfig& config, const Dataset& train, const Dataset* test,
                        const EpochCallback& on_epoch = {});

struct PreparedData {
  Dataset train;
  std::optional<Dataset> test;
};

/// Loads the CVDS sets named in the config, DFT-encodes real-form sets,
/// applies train_limit and noise.
PreparedData prepare_datasets(const RunConfig& config);

/// Applies train_limit and noise to in-memory datasets.
PreparedData prepare_datasets(const RunConfig& config, Dataset train, std::optional<Dataset> test);

/// cmd_train: trains and writes report.json and model.ckpt into `out_dir`.
RunReport run_training(const RunConfig& config, const std::filesystem::path& out_dir,
                       const EpochCallback& on_epoch = {});

}  // namespace steinmetz
