#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "steinmetz/channel.hpp"
#include "steinmetz/checkpoint.hpp"
#include "steinmetz/errors.hpp"
#include "steinmetz/experiment.hpp"
#include "steinmetz/trainer.hpp"
#include "test_support.hpp"

using namespace steinmetz;
using nlohmann::json;
using steinmetz::testing::random_tensor;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("steinmetz_trainer_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Dataset toy_classification(std::size_t m, std::size_t d, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.features_re = random_tensor({m, d}, rng);
  ds.features_im = random_tensor({m, d}, rng);
  ds.task = Task::Classification;
  ds.k = k;
  for (std::size_t i = 0; i < m; ++i) ds.labels.push_back(static_cast<std::uint32_t>(rng.below(k)));
  ds.provenance = "toy";
  return ds;
}

RunConfig toy_config(Architecture kind, const Dataset& ds, std::size_t epochs) {
  RunConfig c;
  c.network = NetworkSpec{kind, ds.input_dim(), 8, ds.k, ds.task};
  c.train.epochs = epochs;
  c.train.seed = 3;
  c.train_path = "in-memory";
  return c;
}

double full_batch_loss(const Model& model, const Dataset& ds) {
  Tape tape;
  BoundParams params = bind(tape, model);
  ForwardOutput out = forward(model, params, tape.constant(ds.features_re), tape.constant(ds.features_im));
  return ds.task == Task::Classification
             ? cross_entropy_loss(out.pred, ds.labels).value().item()
             : mse_loss(out.pred, tape.constant(ds.targets)).value().item();
}

constexpr Architecture kAll[] = {Architecture::RVNN, Architecture::CVNN, Architecture::Steinmetz,
                                 Architecture::Analytic};

}  // namespace

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.network = NetworkSpec{Architecture::Analytic, 784, 64, 10, Task::Classification};
  c.train.learning_rate = 2e-4;
  c.train.seed = 99;
  c.train_path = "data/train";
  c.test_path = "data/test";
  c.train_limit = 500;
  c.noise_eta = 1.5;
  c.noise_test = true;
  c.eval_every = 5;
  RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.network, c.network);
  EXPECT_EQ(back.train, c.train);
}

TEST(RunConfig, NamedValidationErrors) {
  json j = to_json(toy_config(Architecture::RVNN, toy_classification(4, 3, 2, 1), 1));
  json unknown = j;
  unknown["train"]["momentum"] = 0.9;
  try {
    run_config_from_json(unknown);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("momentum"), std::string::npos);
  }
  json odd = j;
  odd["network"]["latent_dim"] = 7;
  EXPECT_THROW(run_config_from_json(odd).validate(), ContractError);
  json wrong_type = j;
  wrong_type["train"]["epochs"] = "many";
  try {
    run_config_from_json(wrong_type);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("epochs"), std::string::npos);
  }
  json bad_kind = j;
  bad_kind["network"]["kind"] = "MLP";
  EXPECT_THROW(run_config_from_json(bad_kind), ContractError);
}

TEST(Training, ZeroEpochsGivesUntrainedModel) {
  Dataset ds = toy_classification(10, 4, 3, 2);
  RunConfig c = toy_config(Architecture::Steinmetz, ds, 0);
  TrainResult r = train_model(c, ds, nullptr);
  EXPECT_TRUE(r.report.epochs.empty());
  Model init = init_params(c.network, c.train.seed);
  for (std::size_t i = 0; i < init.params().size(); ++i) {
    EXPECT_TRUE(bitwise_equal(init.params()[i].value, r.model.params()[i].value));
  }
}

TEST(Training, EpochRecordsAndPenaltyOnlyForAnalytic) {
  Dataset ds = toy_classification(40, 4, 3, 3);
  Dataset test = toy_classification(12, 4, 3, 4);
  for (Architecture kind : kAll) {
    RunConfig c = toy_config(kind, ds, 3);
    c.eval_every = 2;
    TrainResult r = train_model(c, ds, &test);
    ASSERT_EQ(r.report.epochs.size(), 3u);
    for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(r.report.epochs[e].epoch, e + 1);
    EXPECT_EQ(r.report.epochs[0].penalty.has_value(), kind == Architecture::Analytic);
    EXPECT_FALSE(r.report.epochs[0].test_metric.has_value());
    EXPECT_TRUE(r.report.epochs[1].test_metric.has_value());
    EXPECT_TRUE(r.report.epochs[2].test_metric.has_value());
    EXPECT_TRUE(r.report.final_test.has_value());
  }
}

TEST(Training, DeterministicReports) {
  Dataset ds = toy_classification(40, 6, 3, 5);
  RunConfig c = toy_config(Architecture::Analytic, ds, 4);
  const std::string a = to_json(train_model(c, ds, &ds).report, false).dump();
  const std::string b = to_json(train_model(c, ds, &ds).report, false).dump();
  EXPECT_EQ(a, b);
  c.train.seed = 4;
  EXPECT_NE(a, to_json(train_model(c, ds, &ds).report, false).dump());
}

TEST(Training, DimensionMismatchIsDataError) {
  Dataset ds = toy_classification(10, 4, 3, 6);
  RunConfig c = toy_config(Architecture::RVNN, ds, 1);
  c.network.input_dim = 5;
  EXPECT_THROW(train_model(c, ds, nullptr), DataError);
  c = toy_config(Architecture::RVNN, ds, 1);
  c.network.task = Task::ComplexRegression;
  EXPECT_THROW(train_model(c, ds, nullptr), DataError);
}

class MemorizationCanary : public ::testing::TestWithParam<Architecture> {};

TEST_P(MemorizationCanary, LossFallsBelowTenPercent) {
  Dataset ds = toy_classification(50, 16, 4, 7);
  RunConfig c = toy_config(GetParam(), ds, 200);
  c.network.latent_dim = 32;
  c.eval_every = 0;
  const double initial = full_batch_loss(init_params(c.network, c.train.seed), ds);
  TrainResult r = train_model(c, ds, nullptr);
  const double final_loss = full_batch_loss(r.model, ds);
  EXPECT_LT(final_loss, 0.1 * initial) << "initial " << initial;
  // Evaluating on the memorized training set gives near-zero error.
  EXPECT_GE(r.report.final_train.accuracy, 98.0);
}

INSTANTIATE_TEST_SUITE_P(AllArchitectures, MemorizationCanary, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Evaluation, DeterministicAndMismatchChecked) {
  Dataset ds = toy_classification(30, 5, 3, 8);
  Model model = init_params(NetworkSpec{Architecture::Steinmetz, 5, 4, 3, Task::Classification}, 1);
  EXPECT_EQ(to_json(evaluate(model, ds, 7)).dump(), to_json(evaluate(model, ds, 7)).dump());
  // Batch size does not change the metrics beyond rounding of the reductions.
  EXPECT_EQ(evaluate(model, ds, 7).accuracy, evaluate(model, ds, 500).accuracy);

  Model regression = init_params(NetworkSpec{Architecture::Steinmetz, 5, 4, 3, Task::ComplexRegression}, 1);
  EXPECT_THROW(evaluate(regression, ds), DataError);
}

TEST(Evaluation, RegressionMetrics) {
  Dataset ch = gen_channel_dataset(ChannelSpec{}, 64, 1);
  Model model = init_params(NetworkSpec{Architecture::Analytic, 5, 8, 1, Task::ComplexRegression}, 2);
  EvalMetrics m = evaluate(model, ch);
  EXPECT_GT(m.mse, 0.0);
  EXPECT_GT(m.phase_mse, 0.0);
  EXPECT_GE(m.norm_joint, m.norm_separate);
  json j = to_json(m);
  EXPECT_TRUE(j.contains("mag_mse"));
  EXPECT_FALSE(j.contains("accuracy"));
}

TEST(Checkpoint, RoundTripAndCorruption) {
  fs::path dir = scratch_dir("ckpt");
  Model model = init_params(NetworkSpec{Architecture::CVNN, 5, 4, 2, Task::ComplexRegression}, 9);
  save_checkpoint(Checkpoint{model, 9, 12}, dir / "m.ckpt");
  Checkpoint back = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.epoch, 12u);
  EXPECT_EQ(back.model.spec(), model.spec());
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    EXPECT_EQ(back.model.params()[i].name, model.params()[i].name);
    EXPECT_TRUE(bitwise_equal(back.model.params()[i].value, model.params()[i].value));
  }
  fs::resize_file(dir / "m.ckpt", fs::file_size(dir / "m.ckpt") - 8);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), DataError);
  std::ofstream(dir / "junk.ckpt") << "hello";
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), DataError);
}

TEST(RunTraining, WritesReportAndReplaysFromEcho) {
  fs::path dir = scratch_dir("run");
  Dataset train = toy_classification(24, 4, 3, 10);
  Dataset test = toy_classification(10, 4, 3, 11);
  save_cvds(train, dir / "train");
  save_cvds(test, dir / "test");
  RunConfig c = toy_config(Architecture::Analytic, train, 3);
  c.train_path = (dir / "train").string();
  c.test_path = (dir / "test").string();
  c.noise_eta = 0.5;
  RunReport first = run_training(c, dir / "out1");
  ASSERT_TRUE(fs::exists(dir / "out1" / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "out1" / "model.ckpt"));

  json written;
  std::ifstream(dir / "out1" / "report.json") >> written;
  EXPECT_EQ(written["config"]["train"]["batch_size"], 32);
  RunConfig echo = run_config_from_json(written["config"]);
  RunReport second = run_training(echo, dir / "out2");
  EXPECT_EQ(to_json(first, false).dump(), to_json(second, false).dump());

  Checkpoint ck = load_checkpoint(dir / "out2" / "model.ckpt");
  EXPECT_EQ(to_json(evaluate(ck.model, test)).dump(), to_json(*second.final_test).dump());
}

TEST(RunTraining, ConfigFileRelativePaths) {
  fs::path dir = scratch_dir("config_file");
  Dataset train = toy_classification(8, 4, 2, 12);
  save_cvds(train, dir / "data" / "train");
  RunConfig c = toy_config(Architecture::RVNN, train, 1);
  json j = to_json(c);
  j["data"]["train"] = "data/train";
  std::ofstream(dir / "run.json") << j.dump();
  RunConfig loaded = load_run_config(dir / "run.json");
  EXPECT_EQ(fs::path(loaded.train_path), (dir / "data" / "train").lexically_normal());
  EXPECT_THROW(load_run_config(dir / "nope.json"), DataError);
}

TEST(PrepareDatasets, NoiseOnTrainingOnlyByDefault) {
  Dataset train = toy_classification(10, 4, 2, 13), test = toy_classification(5, 4, 2, 14);
  RunConfig c = toy_config(Architecture::RVNN, train, 1);
  c.noise_eta = 1.0;
  c.train_limit = 6;
  PreparedData p = prepare_datasets(c, train, test);
  EXPECT_EQ(p.train.size(), 6u);
  EXPECT_FALSE(bitwise_equal(p.train, train.head(6)));
  EXPECT_TRUE(bitwise_equal(*p.test, test));
  c.noise_test = true;
  EXPECT_FALSE(bitwise_equal(*prepare_datasets(c, train, test).test, test));
}

TEST(Experiment, AggregateSingleSeedHasZeroStd) {
  Aggregate a = aggregate({81.5});
  EXPECT_EQ(a.mean, 81.5);
  EXPECT_EQ(a.std, 0.0);
  Aggregate b = aggregate({1.0, 3.0});
  EXPECT_EQ(b.mean, 2.0);
  EXPECT_EQ(b.std, 1.0);
}

TEST(Experiment, RecipeDefaults) {
  EXPECT_EQ(recipe_defaults("cvmnist500").train_limit, 500u);
  EXPECT_EQ(recipe_defaults("cvmnist500").learning_rate, 1e-3);
  EXPECT_EQ(recipe_defaults("channel-id").learning_rate, 1e-4);
  EXPECT_EQ(recipe_defaults("channel-id").beta, 1e-4);
  EXPECT_EQ(recipe_defaults("channel-id").train_limit, 1000u);
  EXPECT_EQ(recipe_defaults("noise-sweep").train_limit, 2000u);
  EXPECT_THROW(recipe_defaults("cifar"), ContractError);
}

TEST(Experiment, SmallChannelRunIsDeterministic) {
  ExperimentOptions o;
  o.recipe = "channel-id";
  o.seeds = 1;
  o.epochs = 1;
  o.train_limit = 40;
  o.test_limit = 30;
  ExperimentResult a = run_experiment(o);
  ASSERT_EQ(a.runs.size(), 4u);
  EXPECT_EQ(a.cell(Architecture::CVNN, 0.0).size(), 1u);
  EXPECT_EQ(a.metric(Architecture::RVNN, 0.0, [](const RunSummary& r) { return r.test.phase_mse; }).std, 0.0);
  o.jobs = 2;
  ExperimentResult b = run_experiment(o);
  EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
  EXPECT_EQ(format_table(a), format_table(b));
  EXPECT_NE(format_table(a).find("Phase MSE"), std::string::npos);
  EXPECT_NE(format_csv(a).find("Analytic"), std::string::npos);
}

TEST(Experiment, MissingMnistNamesExpectedPath) {
  ExperimentOptions o;
  o.recipe = "cvmnist500";
  o.data_dir = scratch_dir("no_mnist");
  try {
    run_experiment(o);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("mnist_train"), std::string::npos) << e.what();
  }
}
