#include "edgesim/scheduler.hpp"

#include <algorithm>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

bool eligible(const NodeView& n) { return n.state == NodeState::kOn && !n.tainted; }

struct Maxima {
  std::int64_t cpu = 0;
  std::int64_t mem = 0;
};

Maxima fleet_maxima(const ClusterView& view) {
  Maxima m;
  for (const auto& [id, n] : view.nodes) {
    if (!eligible(n)) continue;
    m.cpu = std::max(m.cpu, n.free_cpu);
    m.mem = std::max(m.mem, n.free_mem);
  }
  return m;
}

double score_with_maxima(const NodeView& n, const Maxima& m, const ScoreWeights& w) {
  const double cpu_term =
      m.cpu > 0 ? static_cast<double>(n.free_cpu) / static_cast<double>(m.cpu) : 0.0;
  const double mem_term =
      m.mem > 0 ? static_cast<double>(n.free_mem) / static_cast<double>(m.mem) : 0.0;
  return w.w_cpu * cpu_term + w.w_mem * mem_term;
}

bool predicts_off(const PredictionResponse& prediction, const std::string& node_id) {
  for (std::size_t i = 0; i < prediction.node_ids.size(); ++i) {
    if (prediction.node_ids[i] == node_id) {
      return prediction.statuses[i] == NodeState::kOff;
    }
  }
  return false;
}

}  // namespace

double score_node(const ClusterView& view, const std::string& node_id,
                  const ScoreWeights& weights) {
  auto it = view.nodes.find(node_id);
  if (it == view.nodes.end()) throw UnknownNode("unknown node: " + node_id);
  if (!eligible(it->second)) {
    throw NodeNotEligible("node is OFF or tainted: " + node_id);
  }
  return score_with_maxima(it->second, fleet_maxima(view), weights);
}

std::vector<std::string> feasible_nodes(const ClusterView& view, const ServiceSpec& service,
                                        const ScoreWeights& weights) {
  const Maxima maxima = fleet_maxima(view);
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [id, n] : view.nodes) {
    if (!eligible(n)) continue;
    if (n.free_cpu < service.cpu_millicores || n.free_mem < service.mem_mib) continue;
    scored.emplace_back(score_with_maxima(n, maxima, weights), id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  out.reserve(scored.size());
  for (auto& [_, id] : scored) out.push_back(std::move(id));
  return out;
}

std::string place(ClusterView& view, const ServiceSpec& service, const ScoreWeights& weights) {
  if (view.placements.count(service.service_id)) {
    throw Error("service is already placed: " + service.service_id);
  }
  const std::vector<std::string> candidates = feasible_nodes(view, service, weights);
  if (candidates.empty()) {
    throw NoFeasibleNode("no feasible node for service: " + service.service_id);
  }
  NodeView& n = view.nodes.at(candidates.front());
  n.free_cpu -= service.cpu_millicores;
  n.free_mem -= service.mem_mib;
  view.placements[service.service_id] = candidates.front();
  return candidates.front();
}

void taint(ClusterView& view, const std::string& node_id, const std::string& reason) {
  auto it = view.nodes.find(node_id);
  if (it == view.nodes.end()) throw UnknownNode("unknown node: " + node_id);
  it->second.tainted = true;
  it->second.taint_reason = reason;
}

void untaint(ClusterView& view, const std::string& node_id) {
  auto it = view.nodes.find(node_id);
  if (it == view.nodes.end()) throw UnknownNode("unknown node: " + node_id);
  it->second.tainted = false;
  it->second.taint_reason.clear();
}

DecisionEngine::DecisionEngine(FleetEmulator& fleet, Config config)
    : fleet_(fleet), config_(config) {}

void DecisionEngine::attach(SimLoop& loop) {
  bus_ = &loop.bus();
  bus_->subscribe(kTopicNodeState, [this](const BusMessage& msg) {
    ingest(std::get<StateReport>(msg.payload));
  });
  bus_->subscribe(kTopicNodeResources, [this](const BusMessage& msg) {
    ingest(std::get<ResourceReport>(msg.payload));
  });
  bus_->subscribe(kTopicPrediction, [this](const BusMessage& msg) {
    ingest(std::get<PredictionResponse>(msg.payload));
  });
}

void DecisionEngine::add_service(const ServiceSpec& spec) {
  if (spec.cpu_millicores <= 0 || spec.mem_mib <= 0) {
    throw Error("service requests must be positive: " + spec.service_id);
  }
  ServiceStatus st;
  st.spec = spec;
  if (!services_.emplace(spec.service_id, std::move(st)).second) {
    throw Error("duplicate service id: " + spec.service_id);
  }
}

void DecisionEngine::ingest(const StateReport& report) {
  view_.nodes[report.container_id].state = report.state;
}

void DecisionEngine::ingest(const ResourceReport& report) {
  NodeView& n = view_.nodes[report.container_id];
  n.free_cpu = report.free_cpu_millicores;
  n.free_mem = report.free_mem_mib;
}

void DecisionEngine::ingest(const PredictionResponse& response) {
  view_.latest_prediction = response;
}

void DecisionEngine::refresh_from_fleet(const std::string& node_id) {
  NodeView& n = view_.nodes[node_id];
  n.free_cpu = fleet_.free_cpu(node_id);
  n.free_mem = fleet_.free_mem(node_id);
}

void DecisionEngine::refresh_migration_taints(Tick now) {
  for (auto& [id, n] : view_.nodes) {
    auto manual = manual_taints_.find(id);
    if (manual != manual_taints_.end()) {
      n.tainted = true;
      n.taint_reason = manual->second;
      continue;
    }
    n.tainted = false;
    n.taint_reason.clear();
  }
  for (const auto& [sid, svc] : services_) {
    if (svc.state != ServiceState::kMigrating || svc.mig_from.empty()) continue;
    if (now >= svc.mig_start + svc.mig_duration) continue;
    auto it = view_.nodes.find(svc.mig_from);
    if (it == view_.nodes.end()) continue;
    it->second.tainted = true;
    it->second.taint_reason = "migrating:" + sid;
  }
}

void DecisionEngine::complete_migrations(Tick now) {
  for (auto& [sid, svc] : services_) {
    if (svc.state != ServiceState::kMigrating) continue;
    if (now < svc.mig_start + svc.mig_duration) continue;
    svc.state = ServiceState::kRunning;
    svc.node = svc.mig_to;
    svc.mig_from.clear();
    svc.mig_to.clear();
    svc.mig_live_source = false;
  }
  refresh_migration_taints(now);
}

void DecisionEngine::abort_lost_destinations(Tick now) {
  for (auto& [sid, svc] : services_) {
    if (svc.state != ServiceState::kMigrating) continue;
    auto dest = view_.nodes.find(svc.mig_to);
    if (dest == view_.nodes.end() || dest->second.state == NodeState::kOn) continue;

    // DestinationLost: abort and re-enter planning. Capacity for the new
    // destination is re-checked by the planner's feasibility pass.
    ++aborted_;
    fleet_.remove_service(sid, svc.mig_to);
    refresh_from_fleet(svc.mig_to);
    svc.state = ServiceState::kPending;
    svc.pending_host_off = true;
    svc.last_host = svc.mig_from;
    svc.node.clear();
    svc.mig_from.clear();
    svc.mig_to.clear();
    svc.mig_live_source = false;
  }
  refresh_migration_taints(now);
}

void DecisionEngine::reconcile(Tick now) {
  (void)now;
  for (auto& [sid, svc] : services_) {
    if (svc.state != ServiceState::kRunning) continue;
    auto it = view_.nodes.find(svc.node);
    if (it != view_.nodes.end() && it->second.state == NodeState::kOn) continue;
    fleet_.remove_service(sid, svc.node);
    refresh_from_fleet(svc.node);
    svc.last_host = svc.node;
    svc.node.clear();
    svc.state = ServiceState::kPending;
    svc.pending_host_off = true;
  }
}

std::vector<MigrationAction> DecisionEngine::plan(Tick now) {
  std::vector<MigrationAction> actions;
  ClusterView scratch = view_;

  for (auto& [sid, svc] : services_) {
    if (svc.state == ServiceState::kMigrating) continue;

    if (svc.state == ServiceState::kPending) {
      std::vector<std::string> candidates = feasible_nodes(scratch, svc.spec, config_.weights);
      if (candidates.empty()) continue;  // stays Pending, counted as downtime
      const std::string& dest = candidates.front();

      MigrationAction a;
      a.service_id = sid;
      a.to_node = dest;
      a.start_tick = now;
      if (svc.pending_host_off) {
        a.reason = MigrationReason::kNodeOff;
        a.duration = config_.migration_ticks;
        if (svc.last_host != dest) a.from_node = svc.last_host;
      } else {
        a.reason = MigrationReason::kInitialPlacement;
        a.duration = 0;
      }

      NodeView& d = scratch.nodes.at(dest);
      d.free_cpu -= svc.spec.cpu_millicores;
      d.free_mem -= svc.spec.mem_mib;
      if (!a.from_node.empty() && scratch.nodes.count(a.from_node)) {
        taint(scratch, a.from_node, "migrating:" + sid);
      }
      actions.push_back(std::move(a));
      continue;
    }

    // Running.
    const std::string& host = svc.node;
    auto host_it = scratch.nodes.find(host);
    if (host_it == scratch.nodes.end() || host_it->second.state != NodeState::kOn) {
      continue;  // handled by reconcile
    }

    std::vector<std::string> candidates = feasible_nodes(scratch, svc.spec, config_.weights);
    candidates.erase(std::remove(candidates.begin(), candidates.end(), host),
                     candidates.end());

    const bool host_predicted_off =
        scratch.latest_prediction && predicts_off(*scratch.latest_prediction, host);

    MigrationReason reason;
    if (host_predicted_off) {
      reason = MigrationReason::kPredictedOff;
    } else if (!host_it->second.tainted && !candidates.empty()) {
      const double current = score_node(scratch, host, config_.weights);
      const double best = score_node(scratch, candidates.front(), config_.weights);
      if (best <= current + config_.hysteresis) continue;
      reason = MigrationReason::kBetterScore;
    } else {
      continue;
    }
    if (candidates.empty()) continue;  // nowhere to go; stay put

    const std::string dest = candidates.front();
    MigrationAction a;
    a.service_id = sid;
    a.from_node = host;
    a.to_node = dest;
    a.reason = reason;
    a.start_tick = now;
    a.duration = config_.migration_ticks;

    NodeView& d = scratch.nodes.at(dest);
    d.free_cpu -= svc.spec.cpu_millicores;
    d.free_mem -= svc.spec.mem_mib;
    NodeView& s = host_it->second;
    s.free_cpu += svc.spec.cpu_millicores;
    s.free_mem += svc.spec.mem_mib;
    taint(scratch, host, "migrating:" + sid);
    scratch.placements[sid] = dest;
    actions.push_back(std::move(a));
  }
  return actions;
}

void DecisionEngine::execute(const std::vector<MigrationAction>& actions, Tick now) {
  for (const MigrationAction& a : actions) {
    ServiceStatus& svc = services_.at(a.service_id);

    if (a.reason == MigrationReason::kInitialPlacement) {
      fleet_.place_service(a.service_id, a.to_node, svc.spec.cpu_millicores, svc.spec.mem_mib);
      refresh_from_fleet(a.to_node);
      svc.state = ServiceState::kRunning;
      svc.node = a.to_node;
      svc.pending_host_off = false;
    } else {
      const bool live_source = svc.state == ServiceState::kRunning;
      if (live_source) {
        fleet_.remove_service(a.service_id, svc.node);  // credit source at start
        refresh_from_fleet(svc.node);
      }
      fleet_.place_service(a.service_id, a.to_node, svc.spec.cpu_millicores, svc.spec.mem_mib);
      refresh_from_fleet(a.to_node);
      svc.state = ServiceState::kMigrating;
      svc.mig_from = a.from_node;
      svc.mig_to = a.to_node;
      svc.mig_start = a.start_tick;
      svc.mig_duration = a.duration;
      svc.mig_live_source = live_source;
      svc.node.clear();
      svc.pending_host_off = false;
    }
    if (bus_) bus_->publish(kTopicActions, a);
  }
  refresh_migration_taints(now);
}

void DecisionEngine::step(Tick now) {
  refresh_migration_taints(now);
  complete_migrations(now);
  abort_lost_destinations(now);
  reconcile(now);
  execute(plan(now), now);
}

void DecisionEngine::taint_node(const std::string& node_id, const std::string& reason) {
  if (!view_.nodes.count(node_id)) throw UnknownNode("unknown node: " + node_id);
  manual_taints_[node_id] = reason;
  taint(view_, node_id, reason);
}

void DecisionEngine::untaint_node(const std::string& node_id) {
  if (!view_.nodes.count(node_id)) throw UnknownNode("unknown node: " + node_id);
  manual_taints_.erase(node_id);
  untaint(view_, node_id);
}

}  // namespace edgesim
