#include "steinmetz/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "steinmetz/channel.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/rng.hpp"

namespace steinmetz {

namespace fs = std::filesystem;
using nlohmann::json;

RecipeDefaults recipe_defaults(const std::string& recipe) {
  RecipeDefaults d;
  if (recipe == "cvmnist500") {
    d.epochs = 100;
    d.train_limit = 500;
    d.learning_rate = 1e-3;
    d.beta = 1e-3;
  } else if (recipe == "noise-sweep") {
    d.epochs = 20;
    d.train_limit = 2000;
    d.learning_rate = 1e-3;
    d.beta = 1e-3;
  } else if (recipe == "channel-id") {
    d.epochs = 200;
    d.train_limit = 1000;
    d.learning_rate = 1e-4;
    d.beta = 1e-4;
  } else {
    throw ContractError("unknown recipe '" + recipe +
                        "' (expected cvmnist500, noise-sweep or channel-id)");
  }
  return d;
}

Aggregate aggregate(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<const RunSummary*> ExperimentResult::cell(Architecture kind, double eta) const {
  std::vector<const RunSummary*> out;
  for (const RunSummary& r : runs) {
    if (r.kind == kind && r.eta == eta) out.push_back(&r);
  }
  return out;
}

Aggregate ExperimentResult::metric(Architecture kind, double eta,
                                   const std::function<double(const RunSummary&)>& pick) const {
  std::vector<double> values;
  for (const RunSummary* r : cell(kind, eta)) values.push_back(pick(*r));
  return aggregate(values);
}

namespace {

Dataset load_mnist_split(const fs::path& data_dir, const char* split) {
  const fs::path dir = data_dir / split;
  if (!fs::exists(dir / "meta.json")) {
    throw DataError("missing MNIST dataset: expected a CVDS directory at " + dir.string() +
                    " (meta.json, features_re.bin, labels.bin); see tools/prepare_mnist.py");
  }
  Dataset ds = load_cvds(dir);
  if (ds.task != Task::Classification) {
    throw DataError(dir.string() + " is not a classification dataset");
  }
  return ds.real_form ? dft_encode(ds) : ds;
}

struct Job {
  Architecture kind;
  double eta;
  std::uint64_t seed;
  std::size_t data_index;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentOptions& options, const RunCallback& on_run) {
  const RecipeDefaults d = recipe_defaults(options.recipe);
  if (options.seeds == 0) throw ContractError("seeds must be at least 1");
  if (options.jobs == 0) throw ContractError("jobs must be at least 1");

  ExperimentResult result;
  result.recipe = options.recipe;
  for (std::size_t s = 0; s < options.seeds; ++s) result.seeds.push_back(options.seed + s);
  result.etas = options.recipe == "noise-sweep"
                    ? std::vector<double>(std::begin(kNoiseGrid), std::end(kNoiseGrid))
                    : std::vector<double>{0.0};

  RunConfig base;
  base.train.learning_rate = d.learning_rate;
  base.train.beta = d.beta;
  base.train.batch_size = d.batch_size;
  base.train.epochs = options.epochs > 0 ? options.epochs : d.epochs;
  base.train_limit = options.train_limit > 0 ? options.train_limit : d.train_limit;
  base.eval_every = 0;
  base.network.latent_dim = d.latent_dim;

  // One (train, test) pair per data index: shared MNIST for the image
  // recipes, a freshly generated channel set per seed for channel-id.
  std::vector<std::pair<Dataset, Dataset>> data;
  if (options.recipe == "channel-id") {
    ChannelSpec channel;
    for (std::uint64_t seed : result.seeds) {
      Dataset train = gen_channel_dataset(
          channel, base.train_limit, Rng::substream(seed, "channel-train").next_u64());
      Dataset test = gen_channel_dataset(channel, options.test_limit > 0 ? options.test_limit : 1000,
                                         Rng::substream(seed, "channel-test").next_u64());
      data.emplace_back(std::move(train), std::move(test));
    }
    base.train_path = "synthetic:channel";
    base.test_path = "synthetic:channel";
  } else {
    Dataset train = load_mnist_split(options.data_dir, "mnist_train");
    Dataset test = load_mnist_split(options.data_dir, "mnist_test");
    if (options.test_limit > 0 && options.test_limit < test.size()) {
      test = test.head(options.test_limit);
    }
    data.emplace_back(std::move(train), std::move(test));
    base.train_path = (options.data_dir / "mnist_train").string();
    base.test_path = (options.data_dir / "mnist_test").string();
  }
  const Dataset& first = data.front().first;
  base.network.task = first.task;
  base.network.input_dim = first.input_dim();
  base.network.output_dim = first.k;
  result.task = first.task;
  result.base_config = base;

  std::vector<Job> jobs;
  for (double eta : result.etas) {
    for (Architecture kind : kArchitectures) {
      for (std::size_t s = 0; s < result.seeds.size(); ++s) {
        jobs.push_back({kind, eta, result.seeds[s], data.size() == 1 ? 0 : s});
      }
    }
  }

  std::vector<std::optional<RunSummary>> summaries(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        RunConfig config = base;
        config.network.kind = job.kind;
        config.train.seed = job.seed;
        config.noise_eta = job.eta;
        const auto& [train_full, test] = data[job.data_index];
        PreparedData prepared = prepare_datasets(config, train_full, test);
        TrainResult trained = train_model(config, prepared.train, &*prepared.test);
        RunSummary summary;
        summary.kind = job.kind;
        summary.eta = job.eta;
        summary.seed = job.seed;
        summary.parameter_count = trained.report.parameter_count;
        summary.final_train_loss =
            trained.report.epochs.empty() ? 0.0 : trained.report.epochs.back().train_loss;
        summary.test = *trained.report.final_test;
        summary.wall_clock_seconds = trained.report.wall_clock_seconds;
        summaries[i] = summary;
        if (on_run) {
          std::lock_guard lock(callback_mutex);
          on_run(summary);
        }
      } catch (...) {
        std::lock_guard lock(callback_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const std::size_t threads = std::min(options.jobs, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& s : summaries) result.runs.push_back(std::move(*s));
  return result;
}

namespace {

std::string pm(const Aggregate& a, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << a.mean << " ± " << a.std;
  return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
  // Count UTF-8 code points so "±" occupies one column.
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80;
  return s + std::string(width > cols ? width - cols : 0, ' ');
}

double pick_accuracy(const RunSummary& r) { return r.test.accuracy; }
double pick_magnitude(const RunSummary& r) { return r.test.magnitude_mse; }
double pick_phase(const RunSummary& r) { return r.test.phase_mse; }
double pick_orthogonality(const RunSummary& r) { return r.test.orthogonality; }

}  // namespace

std::string format_table(const ExperimentResult& result) {
  std::ostringstream os;
  const std::size_t n = result.seeds.size();
  os << "recipe: " << result.recipe << "  (mean ± std over " << n << (n == 1 ? " seed" : " seeds")
     << ", epochs " << result.base_config.train.epochs << ", batch "
     << result.base_config.train.batch_size << ")\n";
  if (result.recipe == "noise-sweep") {
    os << pad("Architecture", 13);
    for (std::size_t i = 0; i < result.etas.size(); ++i) {
      std::ostringstream h;
      h << "eta=" << result.etas[i];
      os << (i + 1 < result.etas.size() ? pad(h.str(), 20) : h.str());
    }
    os << '\n';
    for (Architecture kind : kArchitectures) {
      os << pad(std::string(to_string(kind)), 13);
      for (std::size_t i = 0; i < result.etas.size(); ++i) {
        const std::string cell = pm(result.metric(kind, result.etas[i], pick_accuracy), 2);
        os << (i + 1 < result.etas.size() ? pad(cell, 20) : cell);
      }
      os << '\n';
    }
    return os.str();
  }
  if (result.task == Task::Classification) {
    os << pad("Architecture", 13) << pad("Params", 10) << pad("Test accuracy (%)", 22)
       << "Latent orthogonality\n";
    for (Architecture kind : kArchitectures) {
      const auto runs = result.cell(kind, 0.0);
      os << pad(std::string(to_string(kind)), 13)
         << pad(std::to_string(runs.empty() ? 0 : runs.front()->parameter_count), 10)
         << pad(pm(result.metric(kind, 0.0, pick_accuracy), 2), 22)
         << pm(result.metric(kind, 0.0, pick_orthogonality), 4) << '\n';
    }
    return os.str();
  }
  os << pad("Architecture", 13) << pad("Params", 10) << pad("Magnitude MSE", 22) << "Phase MSE\n";
  for (Architecture kind : kArchitectures) {
    const auto runs = result.cell(kind, 0.0);
    os << pad(std::string(to_string(kind)), 13)
       << pad(std::to_string(runs.empty() ? 0 : runs.front()->parameter_count), 10)
       << pad(pm(result.metric(kind, 0.0, pick_magnitude), 4), 22)
       << pm(result.metric(kind, 0.0, pick_phase), 4) << '\n';
  }
  return os.str();
}

std::string format_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "recipe,architecture,eta,seed,parameters,final_train_loss,accuracy,mse,mag_mse,phase_mse,"
        "orthogonality,norm_J,norm_S,hilbert_penalty\n";
  for (const RunSummary& r : result.runs) {
    os << result.recipe << ',' << to_string(r.kind) << ',' << r.eta << ',' << r.seed << ','
       << r.parameter_count << ',' << r.final_train_loss << ',' << r.test.accuracy << ','
       << r.test.mse << ',' << r.test.magnitude_mse << ',' << r.test.phase_mse << ','
       << r.test.orthogonality << ',' << r.test.norm_joint << ',' << r.test.norm_separate << ','
       << r.test.hilbert_penalty << '\n';
  }
  return os.str();
}

json to_json(const ExperimentResult& result, bool include_timing) {
  json runs = json::array();
  for (const RunSummary& r : result.runs) {
    json j{{"architecture", std::string(to_string(r.kind))},
           {"eta", r.eta},
           {"seed", r.seed},
           {"parameter_count", r.parameter_count},
           {"final_train_loss", r.final_train_loss},
           {"test", to_json(r.test)}};
    if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
    runs.push_back(std::move(j));
  }
  json summary = json::array();
  for (double eta : result.etas) {
    for (Architecture kind : kArchitectures) {
      json cell{{"architecture", std::string(to_string(kind))}, {"eta", eta}};
      auto put = [&](const char* name, double (*pick)(const RunSummary&)) {
        const Aggregate a = result.metric(kind, eta, pick);
        cell[name] = {{"mean", a.mean}, {"std", a.std}};
      };
      if (result.task == Task::Classification) {
        put("accuracy", pick_accuracy);
      } else {
        put("mag_mse", pick_magnitude);
        put("phase_mse", pick_phase);
      }
      put("orthogonality", pick_orthogonality);
      summary.push_back(std::move(cell));
    }
  }
  return json{{"recipe", result.recipe},
              {"seeds", result.seeds},
              {"etas", result.etas},
              {"base_config", to_json(result.base_config)},
              {"summary", std::move(summary)},
              {"runs", std::move(runs)}};
}

void write_experiment(const ExperimentResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(out_dir / name);
    if (!out) throw DataError("cannot write " + (out_dir / name).string());
    out << text;
  };
  write("table.txt", format_table(result));
  write("results.csv", format_csv(result));
  write("results.json", to_json(result).dump(2) + "\n");
}

}  // namespace steinmetz
