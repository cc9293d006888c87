// edgesim CLI: scenario simulation, model training/inference from store
// dumps, and side-by-side policy comparison.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edgesim/errors.hpp"
#include "edgesim/jsonl.hpp"
#include "edgesim/runner.hpp"

namespace {

using namespace edgesim;

ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  ScenarioConfig config = load_scenario(path);
  if (seed) {
    config.root_seed = *seed;
    config.predictor.seed = *seed;
  }
  return config;
}

TimeSeriesStore load_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open store dump: " + path);
  return TimeSeriesStore::load_jsonl(in);
}

void print_run_summary(const RunMetrics& metrics) {
  std::printf("%-12s %14s %13s %10s %13s %12s\n", "service", "downtime_ticks", "pending_ticks",
              "node_off", "predicted_off", "better_score");
  for (const auto& [id, m] : metrics.services) {
    std::printf("%-12s %14lld %13lld %10llu %13llu %12llu\n", id.c_str(),
                static_cast<long long>(m.downtime_ticks()),
                static_cast<long long>(m.pending_ticks),
                static_cast<unsigned long long>(m.migration_count(MigrationReason::kNodeOff)),
                static_cast<unsigned long long>(
                    m.migration_count(MigrationReason::kPredictedOff)),
                static_cast<unsigned long long>(
                    m.migration_count(MigrationReason::kBetterScore)));
  }
  std::printf("fleet availability: %.4f\n", metrics.fleet_availability);
  if (metrics.predictor.total() > 0) {
    std::printf("predictor (OFF as positive): precision %.4f recall %.4f accuracy %.4f\n",
                metrics.predictor.precision(), metrics.predictor.recall(),
                metrics.predictor.accuracy());
  }
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
  const ScenarioConfig config = load_config(config_path, seed);
  RunOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  const RunResult result = run_scenario(config, options);
  std::printf("policy: %s, ticks: %lld (training %lld)\n", to_string(config.policy.kind),
              static_cast<long long>(config.duration_ticks),
              static_cast<long long>(config.train_ticks()));
  print_run_summary(result.metrics);
  if (!result.training_loss.empty()) {
    std::printf("training loss: %.6f -> %.6f over %zu epochs\n", result.training_loss.front(),
                result.training_loss.back(), result.training_loss.size());
  }
  if (!out_dir.empty()) std::printf("artifacts written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_path) {
  const ScenarioConfig config = load_scenario(config_path);
  const TimeSeriesStore store = load_store(data_path);
  const auto node_order = store.known_nodes();
  const auto [t0, t1] = store.tick_range();
  const auto dataset = build_dataset(store, node_order, t0, t1, config.predictor.seq_len,
                                     config.predictor.horizon);
  const TrainResult result = train(dataset, config.predictor, node_order);
  save_model(result.params, out_path);
  std::printf("trained on %zu samples (%zu nodes, ticks %lld..%lld)\n", dataset.size(),
              node_order.size(), static_cast<long long>(t0), static_cast<long long>(t1));
  std::printf("loss: %.6f -> %.6f over %zu epochs\n", result.loss_history.front(),
              result.loss_history.back(), result.loss_history.size());
  std::printf("model written to %s\n", out_path.c_str());
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, Tick at) {
  const LstmParams model = load_model(model_path);
  const TimeSeriesStore store = load_store(data_path);
  if (at < model.seq_len) {
    throw InsufficientHistory("need at least seq_len ticks of history before --at");
  }
  const StatusMatrix window =
      store.query_range(model.node_order, at - model.seq_len + 1, at, 1);
  const PredictionResponse resp = predict(model, window, at, model.horizon);
  std::printf("%s\n", dump_deterministic(to_json(resp)).c_str());
  return 0;
}

int cmd_compare(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  ScenarioConfig config = load_config(config_path, seed);
  std::optional<std::filesystem::path> out;
  if (!out_dir.empty()) out = out_dir;
  const PolicyComparison comparison = compare_policies(config, out);
  std::printf("%s", comparison.table().c_str());
  if (out) std::printf("per-policy artifacts written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgesim: proactive service-migration simulator for volatile edge fleets"};
  app.require_subcommand(1);

  std::string config_path, data_path, model_path, out_path;
  std::optional<std::uint64_t> seed;
  Tick at = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and report metrics");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--seed", seed, "Override root_seed (and the predictor seed)");
  simulate->add_option("--out", out_path,
                       "Directory for events.jsonl, metrics.csv, store.jsonl, model.json");

  auto* train_cmd = app.add_subcommand("train", "Train a status prediction model from a store dump");
  train_cmd->add_option("--config", config_path, "Scenario JSON file (predictor section)")
      ->required();
  train_cmd->add_option("--data", data_path, "Store dump (JSON Lines of state reports)")
      ->required();
  train_cmd->add_option("--out", model_path, "Output model file")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Predict node status from recent history");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--data", data_path, "Store dump (JSON Lines of state reports)")
      ->required();
  predict_cmd->add_option("--at", at, "Tick the prediction is issued at")->required();

  auto* compare = app.add_subcommand("compare", "Run all three policies on one fleet realization");
  compare->add_option("--config", config_path, "Scenario JSON file")->required();
  compare->add_option("--seed", seed, "Override root_seed (and the predictor seed)");
  compare->add_option("--out", out_path, "Directory for per-policy artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out_path);
    if (train_cmd->parsed()) return cmd_train(config_path, data_path, model_path);
    if (predict_cmd->parsed()) return cmd_predict(model_path, data_path, at);
    if (compare->parsed()) return cmd_compare(config_path, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
