#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "edgesim/time.hpp"

namespace edgesim {

// Fixed bus topics.
inline constexpr const char* kTopicNodeState = "node.state";
inline constexpr const char* kTopicNodeResources = "node.resources";
inline constexpr const char* kTopicPrediction = "prediction.response";
inline constexpr const char* kTopicActions = "de.actions";

enum class NodeState : std::uint8_t { kOff = 0, kOn = 1 };

inline const char* to_string(NodeState s) { return s == NodeState::kOn ? "ON" : "OFF"; }
NodeState node_state_from_string(const std::string& s);

// The telemetry triple every node reports: when, who, and ON/OFF.
struct StateReport {
  Tick timestamp = 0;
  std::string container_id;
  NodeState state = NodeState::kOff;

  friend bool operator==(const StateReport&, const StateReport&) = default;
};

// Allocatable-resource telemetry, emitted only by ON nodes.
struct ResourceReport {
  Tick timestamp = 0;
  std::string container_id;
  std::int64_t free_cpu_millicores = 0;
  std::int64_t free_mem_mib = 0;
};

// Per-node forecast at target_tick = issued_at + horizon. statuses[i] is ON
// iff probabilities[i] >= 0.5.
struct PredictionResponse {
  Tick issued_at = 0;
  Tick target_tick = 0;
  std::vector<std::string> node_ids;
  std::vector<double> probabilities;
  std::vector<NodeState> statuses;
};

enum class MigrationReason : std::uint8_t {
  kInitialPlacement,
  kNodeOff,
  kPredictedOff,
  kBetterScore,
};

const char* to_string(MigrationReason r);

struct MigrationAction {
  std::string service_id;
  std::string from_node;  // empty for initial placements
  std::string to_node;
  MigrationReason reason = MigrationReason::kInitialPlacement;
  Tick start_tick = 0;
  Tick duration = 0;
};

using EventPayload = std::variant<StateReport, ResourceReport, PredictionResponse, MigrationAction>;

// JSON encodings. `timestamp` fields are encoded as seconds (tick * 60);
// tick-named fields stay in ticks.
nlohmann::json to_json(const StateReport& r);
nlohmann::json to_json(const ResourceReport& r);
nlohmann::json to_json(const PredictionResponse& r);
nlohmann::json to_json(const MigrationAction& a);
nlohmann::json to_json(const EventPayload& p);

StateReport state_report_from_json(const nlohmann::json& j);

}  // namespace edgesim
