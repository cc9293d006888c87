#include "edgesim/events.hpp"

#include "edgesim/errors.hpp"

namespace edgesim {

NodeState node_state_from_string(const std::string& s) {
  if (s == "ON") return NodeState::kOn;
  if (s == "OFF") return NodeState::kOff;
  throw MalformedReport("unknown state value: " + s);
}

const char* to_string(MigrationReason r) {
  switch (r) {
    case MigrationReason::kInitialPlacement: return "INITIAL_PLACEMENT";
    case MigrationReason::kNodeOff: return "NODE_OFF";
    case MigrationReason::kPredictedOff: return "PREDICTED_OFF";
    case MigrationReason::kBetterScore: return "BETTER_SCORE";
  }
  return "UNKNOWN";
}

nlohmann::json to_json(const StateReport& r) {
  return {
      {"timestamp", tick_to_seconds(r.timestamp)},
      {"container_id", r.container_id},
      {"state", to_string(r.state)},
  };
}

nlohmann::json to_json(const ResourceReport& r) {
  return {
      {"timestamp", tick_to_seconds(r.timestamp)},
      {"container_id", r.container_id},
      {"free_cpu_millicores", r.free_cpu_millicores},
      {"free_mem_mib", r.free_mem_mib},
  };
}

nlohmann::json to_json(const PredictionResponse& r) {
  nlohmann::json statuses = nlohmann::json::array();
  for (NodeState s : r.statuses) statuses.push_back(to_string(s));
  return {
      {"issued_at", r.issued_at},
      {"target_tick", r.target_tick},
      {"node_ids", r.node_ids},
      {"probabilities", r.probabilities},
      {"statuses", statuses},
  };
}

nlohmann::json to_json(const MigrationAction& a) {
  return {
      {"tick", a.start_tick},
      {"service_id", a.service_id},
      {"from", a.from_node},
      {"to", a.to_node},
      {"reason", to_string(a.reason)},
      {"duration", a.duration},
  };
}

nlohmann::json to_json(const EventPayload& p) {
  return std::visit([](const auto& v) { return to_json(v); }, p);
}

StateReport state_report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("timestamp") || !j.contains("container_id") ||
      !j.contains("state")) {
    throw MalformedReport("state report requires timestamp, container_id, state");
  }
  StateReport r;
  r.timestamp = seconds_to_tick(j.at("timestamp").get<std::int64_t>());
  r.container_id = j.at("container_id").get<std::string>();
  r.state = node_state_from_string(j.at("state").get<std::string>());
  return r;
}

}  // namespace edgesim
