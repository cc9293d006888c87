#include "edgesim/runner.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "edgesim/errors.hpp"
#include "edgesim/jsonl.hpp"
#include "edgesim/monitor.hpp"
#include "edgesim/sim.hpp"
#include "edgesim/store.hpp"

namespace edgesim {

namespace {

// Tick phase order: telemetry, prediction relay, decision round, accounting.
constexpr int kPhaseEmit = 0;
constexpr int kPhaseRelay = 50;
constexpr int kPhaseDecide = 100;
constexpr int kPhaseAccount = 200;

PredictionResponse oracle_prediction(const FleetEmulator& fleet, Tick issued_at, Tick target) {
  PredictionResponse resp;
  resp.issued_at = issued_at;
  resp.target_tick = target;
  for (const std::string& id : fleet.node_ids()) {
    const NodeState truth = fleet.status_at(id, target);
    resp.node_ids.push_back(id);
    resp.probabilities.push_back(truth == NodeState::kOn ? 1.0 : 0.0);
    resp.statuses.push_back(truth);
  }
  return resp;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);

  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  SimLoop loop;
  RngStream fleet_rng = fork_rng(config.root_seed, "fleet-gen");
  FleetEmulator fleet(build_fleet(config.fleet, fleet_rng), config.root_seed, &loop.clock());

  TimeSeriesStore store;
  for (const std::string& id : fleet.node_ids()) store.register_node(id);

  const Tick eval_start = config.eval_start();

  MonitoringService monitor(store, MonitoringService::Options{config.prediction_interval,
                                                              eval_start,
                                                              config.predictor.seq_len});
  monitor.set_node_order(fleet.node_ids());
  monitor.attach(loop);

  DecisionEngine engine(fleet, DecisionEngine::Config{config.policy.weights,
                                                      config.policy.hysteresis,
                                                      config.policy.migration_ticks});
  engine.attach(loop);

  RunResult result;
  RunMetrics& metrics = result.metrics;
  metrics.eval_start = eval_start;
  metrics.duration_ticks = config.duration_ticks;
  for (const ServiceSpec& s : config.services) {
    metrics.services[s.service_id].start_tick = eval_start;
  }

  // Event log: every message in publish order.
  std::unique_ptr<JsonlWriter> event_log;
  if (options.out_dir) {
    event_log = std::make_unique<JsonlWriter>((*options.out_dir / "events.jsonl").string());
    loop.bus().set_log_sink([&log = *event_log](const BusMessage& msg) {
      nlohmann::json j = to_json(msg.payload);
      j["topic"] = msg.topic;
      j["seq"] = msg.seq;
      j["tick"] = msg.publish_tick;
      log.write(j);
    });
  }

  // Migration accounting straight off the bus, so the metrics count exactly
  // what the log records.
  loop.bus().subscribe(kTopicActions, [&metrics](const BusMessage& msg) {
    const auto& action = std::get<MigrationAction>(msg.payload);
    ++metrics.services[action.service_id].migrations[action.reason];
  });

  // Prediction scoring against ground truth at the target tick.
  loop.bus().subscribe(kTopicPrediction, [&metrics, &fleet, &config](const BusMessage& msg) {
    const auto& resp = std::get<PredictionResponse>(msg.payload);
    if (resp.target_tick >= config.duration_ticks) return;
    for (std::size_t i = 0; i < resp.node_ids.size(); ++i) {
      const NodeState truth = fleet.status_at(resp.node_ids[i], resp.target_tick);
      metrics.predictor.add(resp.statuses[i] == NodeState::kOff, truth == NodeState::kOff);
    }
  });

  loop.every_tick(kPhaseEmit, [&fleet, &loop, &config](Tick t) {
    if (t % config.report_interval == 0) fleet.emit_reports(loop.bus(), t);
  });
  loop.every_tick(kPhaseRelay, [&monitor](Tick t) { monitor.step(t); });
  loop.every_tick(kPhaseDecide, [&engine, eval_start](Tick t) {
    if (t >= eval_start) engine.step(t);
  });

  std::uint64_t on_node_ticks = 0;
  loop.every_tick(kPhaseAccount, [&](Tick t) {
    if (t < eval_start) return;
    for (const std::string& id : fleet.node_ids()) {
      if (fleet.status_at(id, t) == NodeState::kOn) ++on_node_ticks;
    }
    for (const auto& [sid, svc] : engine.services()) {
      ServiceMetrics& m = metrics.services[sid];
      switch (svc.state) {
        case ServiceState::kRunning:
          if (fleet.status_at(svc.node, t) == NodeState::kOn) ++m.running_ticks;
          else ++m.off_host_ticks;
          break;
        case ServiceState::kMigrating:
          if (svc.mig_live_source && !svc.mig_from.empty() &&
              fleet.status_at(svc.mig_from, t) == NodeState::kOn) {
            ++m.running_ticks;  // live pre-copy: source still serving
          } else {
            ++m.migrating_unavailable_ticks;
          }
          break;
        case ServiceState::kPending:
          ++m.pending_ticks;
          break;
      }
    }
    if (options.on_tick) options.on_tick(TickSnapshot{t, fleet, engine});
  });

  // Phase 1: telemetry only. The LSTM policy trains on the phase-1 store;
  // the oracle reads ground truth directly.
  if (config.policy.kind == PolicyKind::kProactiveOracle) {
    const Tick horizon = config.predictor.horizon;
    monitor.set_predictor([&fleet, horizon](const StatusMatrix&, Tick issued_at) {
      return oracle_prediction(fleet, issued_at, issued_at + horizon);
    });
  }

  loop.run_until(eval_start);

  if (config.policy.kind == PolicyKind::kProactiveLstm) {
    auto dataset = build_dataset(store, fleet.node_ids(), 0, eval_start - 1,
                                 config.predictor.seq_len, config.predictor.horizon);
    TrainResult trained = train(dataset, config.predictor, fleet.node_ids());
    result.training_loss = trained.loss_history;
    auto model = std::make_shared<LstmParams>(std::move(trained.params));
    if (options.out_dir) save_model(*model, (*options.out_dir / "model.json").string());
    monitor.set_model(model);
  }

  // Phase 2: services enter planning at eval_start (the next processed tick).
  for (const ServiceSpec& s : config.services) engine.add_service(s);

  loop.run_until(config.duration_ticks);

  const Tick eval_ticks = config.duration_ticks - eval_start;
  metrics.fleet_availability =
      eval_ticks > 0 && !fleet.node_ids().empty()
          ? static_cast<double>(on_node_ticks) /
                (static_cast<double>(eval_ticks) * static_cast<double>(fleet.node_ids().size()))
          : 0.0;

  if (options.out_dir) {
    std::ofstream metrics_out(*options.out_dir / "metrics.csv");
    write_metrics_csv(metrics_out, metrics);
    std::ofstream store_out(*options.out_dir / "store.jsonl");
    store.dump_jsonl(store_out);
  }
  return result;
}

PolicyComparison compare_policies(const ScenarioConfig& config,
                                  const std::optional<std::filesystem::path>& out_dir) {
  PolicyComparison comparison;
  for (PolicyKind kind :
       {PolicyKind::kReactive, PolicyKind::kProactiveOracle, PolicyKind::kProactiveLstm}) {
    ScenarioConfig run_config = config;
    run_config.policy.kind = kind;
    RunOptions options;
    if (out_dir) options.out_dir = *out_dir / to_string(kind);
    RunResult result = run_scenario(run_config, options);
    comparison.runs.emplace_back(kind, std::move(result.metrics));
  }
  if (out_dir) {
    std::ofstream out(*out_dir / "comparison.csv");
    write_comparison_csv(out, comparison);
  }
  return comparison;
}

std::string PolicyComparison::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %14s %14s %10s %13s %12s %10s\n", "policy",
                "downtime_ticks", "pending_ticks", "node_off", "predicted_off", "better_score",
                "accuracy");
  out << line;
  for (const auto& [kind, metrics] : runs) {
    Tick pending = 0;
    for (const auto& [_, m] : metrics.services) pending += m.pending_ticks;
    std::string acc = "-";
    if (metrics.predictor.total() > 0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", metrics.predictor.accuracy());
      acc = buf;
    }
    std::snprintf(line, sizeof(line), "%-18s %14lld %14lld %10llu %13llu %12llu %10s\n",
                  to_string(kind), static_cast<long long>(metrics.total_downtime()),
                  static_cast<long long>(pending),
                  static_cast<unsigned long long>(
                      metrics.total_migrations(MigrationReason::kNodeOff)),
                  static_cast<unsigned long long>(
                      metrics.total_migrations(MigrationReason::kPredictedOff)),
                  static_cast<unsigned long long>(
                      metrics.total_migrations(MigrationReason::kBetterScore)),
                  acc.c_str());
    out << line;
  }
  return out.str();
}

void write_comparison_csv(std::ostream& out, const PolicyComparison& comparison) {
  out << "policy,downtime_ticks,pending_ticks,migrations_node_off,"
         "migrations_predicted_off,migrations_better_score,predictor_accuracy\n";
  for (const auto& [kind, metrics] : comparison.runs) {
    Tick pending = 0;
    for (const auto& [_, m] : metrics.services) pending += m.pending_ticks;
    out << to_string(kind) << ',' << metrics.total_downtime() << ',' << pending << ','
        << metrics.total_migrations(MigrationReason::kNodeOff) << ','
        << metrics.total_migrations(MigrationReason::kPredictedOff) << ','
        << metrics.total_migrations(MigrationReason::kBetterScore) << ',';
    if (metrics.predictor.total() > 0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", metrics.predictor.accuracy());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace edgesim
