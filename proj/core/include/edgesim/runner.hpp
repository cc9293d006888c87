#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/fleet.hpp"
#include "edgesim/metrics.hpp"
#include "edgesim/scenario.hpp"
#include "edgesim/scheduler.hpp"

namespace edgesim {

// Per-tick view handed to the inspection hook after the decision round.
struct TickSnapshot {
  Tick tick = 0;
  const FleetEmulator& fleet;
  const DecisionEngine& engine;
};

struct RunOptions {
  // When set, writes events.jsonl, metrics.csv, store.jsonl and (for the
  // LSTM policy) model.json into this directory.
  std::optional<std::filesystem::path> out_dir;
  // Invoked once per evaluation tick, after the decision round.
  std::function<void(const TickSnapshot&)> on_tick;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<double> training_loss;  // empty unless the LSTM policy trained
};

// Phase 1 emulates telemetry for training_days (training the model under the
// LSTM policy); phase 2 places the services and runs the orchestration loop
// until duration_ticks. Deterministic per (config, root_seed).
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct PolicyComparison {
  std::vector<std::pair<PolicyKind, RunMetrics>> runs;
  std::string table() const;  // aligned text table
};

// Runs reactive, proactive_oracle and proactive_lstm on the identical fleet
// realization and tabulates the metrics side by side.
PolicyComparison compare_policies(const ScenarioConfig& config,
                                  const std::optional<std::filesystem::path>& out_dir = {});

void write_comparison_csv(std::ostream& out, const PolicyComparison& comparison);

}  // namespace edgesim
