#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinmetz/models.hpp"
#include "steinmetz/trainer.hpp"

namespace steinmetz {

/// Names accepted by run_experiment.
inline constexpr const char* kRecipeNames[] = {"cvmnist500", "noise-sweep", "channel-id"};

/// Architectures in table order.
inline constexpr Architecture kArchitectures[] = {Architecture::RVNN, Architecture::CVNN,
                                                  Architecture::Steinmetz, Architecture::Analytic};

inline constexpr double kNoiseGrid[] = {0.0, 0.5, 1.0, 1.5, 2.0};

struct ExperimentOptions {
  std::string recipe;
  /// Seeds used are seed, seed + 1, ..., seed + seeds - 1.
  std::uint64_t seed = 0;
  std::size_t seeds = 5;
  /// Holds mnist_train/ and mnist_test/ CVDS directories (real or complex form).
  std::filesystem::path data_dir = "data";
  /// Overrides of the recipe defaults; 0 keeps the default.
  std::size_t epochs = 0;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  /// Independent trainers run on this many threads.
  std::size_t jobs = 1;
};

/// Recipe defaults, before option overrides.
struct RecipeDefaults {
  std::size_t epochs = 0;
  std::size_t train_limit = 0;
  std::size_t latent_dim = 64;
  double learning_rate = 0.0;
  double beta = 0.0;
  std::size_t batch_size = 32;
};

RecipeDefaults recipe_defaults(const std::string& recipe);

struct RunSummary {
  Architecture kind = Architecture::RVNN;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::size_t parameter_count = 0;
  double final_train_loss = 0.0;
  EvalMetrics test;
  double wall_clock_seconds = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  /// Population standard deviation; 0 for a single seed.
  double std = 0.0;
};

Aggregate aggregate(const std::vector<double>& values);

struct ExperimentResult {
  std::string recipe;
  Task task = Task::Classification;
  RunConfig base_config;
  std::vector<double> etas;
  std::vector<std::uint64_t> seeds;
  /// Ordered by eta, then architecture, then seed.
  std::vector<RunSummary> runs;

  /// Runs for one (architecture, eta) cell.
  std::vector<const RunSummary*> cell(Architecture kind, double eta) const;
  /// Mean/std of a metric over the seeds of one cell.
  Aggregate metric(Architecture kind, double eta,
                   const std::function<double(const RunSummary&)>& pick) const;
};

using RunCallback = std::function<void(const RunSummary&)>;

/// Trains every architecture over every seed (and noise level) of a recipe.
/// Throws DataError naming the expected CVDS path when MNIST data is missing.
ExperimentResult run_experiment(const ExperimentOptions& options, const RunCallback& on_run = {});

/// Plain-text table in the layout of the corresponding published table.
std::string format_table(const ExperimentResult& result);
/// One row per run.
std::string format_csv(const ExperimentResult& result);
/// `include_timing` = false drops wall-clock fields for bitwise comparisons.
nlohmann::json to_json(const ExperimentResult& result, bool include_timing = true);

/// Writes table.txt, results.csv and results.json into `out_dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace steinmetz
