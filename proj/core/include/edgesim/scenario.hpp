#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/fleet.hpp"
#include "edgesim/lstm.hpp"
#include "edgesim/scheduler.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

enum class PolicyKind : std::uint8_t { kReactive, kProactiveOracle, kProactiveLstm };

const char* to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

struct PolicySection {
  PolicyKind kind = PolicyKind::kReactive;
  ScoreWeights weights;
  double hysteresis = 0.2;
  Tick migration_ticks = 2;
};

struct ScenarioConfig {
  std::uint64_t root_seed = 1;
  Tick duration_ticks = 0;
  int training_days = 0;  // first training_days * 1440 ticks feed the trainer
  Tick report_interval = 1;
  Tick prediction_interval = 15;
  FleetConfig fleet;
  std::vector<ServiceSpec> services;
  PolicySection policy;
  TrainHyper predictor;

  Tick train_ticks() const { return static_cast<Tick>(training_days) * kTicksPerDay; }
  Tick eval_start() const { return train_ticks(); }
};

// Throws InvalidConfig / InvalidFleetConfig / InvalidHyper on bad input.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

// "HH:MM-HH:MM" -> [start, end) ticks of day; "24:00" is a valid end.
AvailabilityWindow parse_window(const std::string& text);

}  // namespace edgesim
