#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "steinmetz/channel.hpp"
#include "steinmetz/checkpoint.hpp"
#include "steinmetz/dataset.hpp"
#include "steinmetz/diagnostics.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/experiment.hpp"
#include "steinmetz/signal.hpp"
#include "steinmetz/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steinmetz;

namespace {

void emit_json(const json& j, const std::string& out_file) {
  const std::string text = j.dump(2);
  std::cout << text << '\n';
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw DataError("cannot write " + out_file);
    out << text << '\n';
  }
}

struct GenArgs {
  std::string task;
  double rho = ChannelSpec{}.rho;
  double snr_db = ChannelSpec{}.snr_db;
  double eta = 0.0;
  std::size_t m = 1000;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;
};

void cmd_gen(const GenArgs& a) {
  Dataset ds;
  if (a.task == "channel") {
    ChannelSpec spec;
    spec.rho = a.rho;
    spec.snr_db = a.snr_db;
    ds = gen_channel_dataset(spec, a.m, a.seed);
  } else {
    if (a.in.empty()) throw ContractError("--in is required for --task " + a.task);
    Dataset source = load_cvds(a.in);
    if (a.task == "noise") {
      ds = add_complex_noise(source.real_form ? dft_encode(source) : source, a.eta, a.seed);
    } else {
      ds = dft_encode(source);
    }
  }
  save_cvds(ds, a.out);
  std::cout << "wrote " << ds.size() << " rows (dN=" << ds.input_dim() << ", " << to_string(ds.task)
            << ") to " << a.out << '\n';
}

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string out = "run";
};

void cmd_train(const TrainArgs& a) {
  RunConfig config = load_run_config(a.config);
  if (a.seed) config.train.seed = *a.seed;
  if (a.epochs) config.train.epochs = *a.epochs;
  RunReport report = run_training(config, a.out, [](const EpochRecord& e) {
    std::cout << "epoch " << e.epoch << "  train_loss " << e.train_loss;
    if (e.penalty) std::cout << "  penalty " << *e.penalty;
    if (e.test_metric) std::cout << "  test_metric " << *e.test_metric;
    std::cout << '\n';
  });
  std::cout << "final train: " << to_json(report.final_train).dump() << '\n';
  if (report.final_test) std::cout << "final test: " << to_json(*report.final_test).dump() << '\n';
  std::cout << "wrote " << (fs::path(a.out) / "report.json").string() << " and "
            << (fs::path(a.out) / "model.ckpt").string() << '\n';
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::size_t batch = 500;
  double p = 2.0;
  double q = 2.0;
};

Dataset load_for(const Model& model, const std::string& path) {
  Dataset ds = load_cvds(path);
  if (ds.real_form) ds = dft_encode(ds);
  check_compatible(model.spec(), ds);
  return ds;
}

void cmd_eval(const EvalArgs& a) {
  Checkpoint ck = load_checkpoint(a.checkpoint);
  Dataset ds = load_for(ck.model, a.data);
  json j = to_json(evaluate(ck.model, ds, a.batch));
  j["architecture"] = std::string(to_string(ck.model.spec().kind));
  j["dataset"] = ds.provenance;
  emit_json(j, a.out);
}

void cmd_diag(const EvalArgs& a) {
  Checkpoint ck = load_checkpoint(a.checkpoint);
  Dataset ds = load_for(ck.model, a.data);
  ForwardPass pass = run_forward(ck.model, ds, a.batch);
  const EvalMetrics m = evaluate(ck.model, ds, a.batch);

  json batches = json::array();
  for (std::size_t start = 0; start + 1 < ds.size(); start += a.batch) {
    std::vector<std::size_t> rows;
    for (std::size_t r = start; r < std::min(ds.size(), start + a.batch); ++r) rows.push_back(r);
    if (rows.size() < 2) break;
    CovarianceComparison c = covariance_comparison(gather_rows(pass.latent_re, rows),
                                                   gather_rows(pass.latent_im, rows), a.p, a.q);
    batches.push_back({{"start", start}, {"norm_J", c.norm_joint}, {"norm_S", c.norm_separate}});
  }
  CovarianceComparison all = covariance_comparison(pass.latent_re, pass.latent_im, a.p, a.q);

  json j{{"architecture", std::string(to_string(ck.model.spec().kind))},
         {"samples", ds.size()},
         {"orthogonality", m.orthogonality},
         {"zero_latent_rows", m.zero_latent_rows},
         {"hilbert_penalty", m.hilbert_penalty},
         {"p", a.p},
         {"q", a.q},
         {"norm_J", all.norm_joint},
         {"norm_S", all.norm_separate},
         {"norm_ratio", all.ratio},
         {"batches", std::move(batches)}};
  if (ds.task == Task::Classification) {
    j["accuracy"] = m.accuracy;
  } else {
    j["mse"] = m.mse;
    j["mag_mse"] = m.magnitude_mse;
    j["phase_mse"] = m.phase_mse;
  }
  emit_json(j, a.out);
}

struct HilbertArgs {
  std::string in;
  std::string out;
  std::string method = "freq";
};

void cmd_hilbert(const HilbertArgs& a) {
  Dataset ds = load_cvds(a.in);
  const std::size_t m = ds.size();
  const std::size_t n = ds.input_dim();
  std::vector<double> im;
  im.reserve(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    std::span<const double> row = ds.features_re.row(r);
    std::vector<double> x(row.begin(), row.end());
    std::vector<double> h =
        a.method == "cotangent" ? signal::dht_cotangent(x) : signal::hilbert_freq(x);
    im.insert(im.end(), h.begin(), h.end());
  }
  ds.features_im = Tensor({m, n}, std::move(im));
  ds.real_form = false;
  ds.provenance += " | analytic signal (" + a.method + ")";
  save_cvds(ds, a.out);
  std::cout << "wrote analytic-signal features for " << m << " rows to " << a.out << '\n';
}

void cmd_experiment(const ExperimentOptions& options, const std::string& out) {
  ExperimentResult result = run_experiment(options, [](const RunSummary& r) {
    std::cerr << "  " << to_string(r.kind) << " seed " << r.seed;
    if (r.eta != 0.0) std::cerr << " eta " << r.eta;
    std::cerr << ": " << (r.test.task == Task::Classification ? "accuracy " : "mse ")
              << r.test.task_metric() << " (" << r.wall_clock_seconds << " s)\n";
  });
  std::cout << format_table(result);
  write_experiment(result, out);
  std::cout << "wrote " << out << "/{table.txt,results.csv,results.json}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steinmetz and Analytic networks for complex-valued data"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate or transform a CVDS dataset");
  gen_cmd->add_option("--task", gen.task, "channel | noise | dft-encode")
      ->required()
      ->check(CLI::IsMember({"channel", "noise", "dft-encode"}));
  gen_cmd->add_option("--rho", gen.rho, "Channel input circularity");
  gen_cmd->add_option("--snr-db", gen.snr_db, "Channel output SNR in dB");
  gen_cmd->add_option("--eta", gen.eta, "Noise scale for --task noise");
  gen_cmd->add_option("--m", gen.m, "Number of channel samples");
  gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
  gen_cmd->add_option("--in", gen.in, "Input CVDS directory");
  gen_cmd->add_option("--out", gen.out, "Output CVDS directory")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one network from a JSON config");
  train_cmd->add_option("--config", train.config, "Run config JSON")->required();
  train_cmd->add_option("--seed", train.seed, "Override train.seed");
  train_cmd->add_option("--epochs", train.epochs, "Override train.epochs");
  train_cmd->add_option("--out", train.out, "Output directory for report.json and model.ckpt");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  EvalArgs diag;
  auto* diag_cmd = app.add_subcommand("diag", "Latent-space diagnostics of a checkpoint");
  for (auto [cmd, args] : {std::pair{eval_cmd, &eval}, std::pair{diag_cmd, &diag}}) {
    cmd->add_option("--checkpoint", args->checkpoint, "Checkpoint file")->required();
    cmd->add_option("--data", args->data, "CVDS dataset directory")->required();
    cmd->add_option("--out", args->out, "Also write the JSON to this file");
    cmd->add_option("--batch", args->batch, "Rows per forward pass");
  }
  diag_cmd->add_option("--p", diag.p, "Outer exponent of the L_{p,q} norm");
  diag_cmd->add_option("--q", diag.q, "Inner exponent of the L_{p,q} norm");

  HilbertArgs hilbert;
  auto* hilbert_cmd =
      app.add_subcommand("hilbert", "Replace imaginary features by the Hilbert transform");
  hilbert_cmd->add_option("--in", hilbert.in, "Input CVDS directory")->required();
  hilbert_cmd->add_option("--out", hilbert.out, "Output CVDS directory")->required();
  hilbert_cmd->add_option("--method", hilbert.method, "freq | cotangent")
      ->check(CLI::IsMember({"freq", "cotangent"}));

  ExperimentOptions experiment;
  std::string experiment_out = "results";
  std::string data_dir = "data";
  auto* exp_cmd = app.add_subcommand("experiment", "Run a reproduction recipe");
  exp_cmd->add_option("recipe", experiment.recipe, "cvmnist500 | noise-sweep | channel-id")
      ->required()
      ->check(CLI::IsMember({"cvmnist500", "noise-sweep", "channel-id"}));
  exp_cmd->add_option("--seed", experiment.seed, "First seed");
  exp_cmd->add_option("--seeds", experiment.seeds, "Number of seeds");
  exp_cmd->add_option("--data-dir", data_dir, "Directory holding mnist_train/ and mnist_test/");
  exp_cmd->add_option("--epochs", experiment.epochs, "Override the recipe epoch budget");
  exp_cmd->add_option("--train-limit", experiment.train_limit, "Override the training-set size");
  exp_cmd->add_option("--test-limit", experiment.test_limit, "Use only the first N test rows");
  exp_cmd->add_option("--jobs", experiment.jobs, "Parallel trainers");
  exp_cmd->add_option("--out", experiment_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) cmd_gen(gen);
    if (train_cmd->parsed()) cmd_train(train);
    if (eval_cmd->parsed()) cmd_eval(eval);
    if (diag_cmd->parsed()) cmd_diag(diag);
    if (hilbert_cmd->parsed()) cmd_hilbert(hilbert);
    if (exp_cmd->parsed()) {
      experiment.data_dir = data_dir;
      cmd_experiment(experiment, experiment_out);
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
