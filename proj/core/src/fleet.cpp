#include "edgesim/fleet.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

void validate_schedule(const std::string& id, const AvailabilitySchedule& s) {
  if (s.flip_noise_p < 0.0 || s.flip_noise_p > 1.0) {
    throw InvalidFleetConfig("node " + id + ": flip_noise_p outside [0,1]");
  }
  Tick prev_end = -1;
  for (const auto& w : s.on_windows) {
    if (w.start < 0 || w.end > kTicksPerDay || w.start >= w.end) {
      throw InvalidFleetConfig("node " + id + ": malformed availability window");
    }
    if (w.start < prev_end) {
      throw InvalidFleetConfig("node " + id + ": windows must be sorted and non-overlapping");
    }
    prev_end = w.end;
  }
  for (const auto& o : s.outages) {
    if (o.start < 0 || o.duration <= 0) {
      throw InvalidFleetConfig("node " + id + ": malformed outage");
    }
  }
}

void validate_node(const NodeSpec& n) {
  if (n.node_id.empty()) throw InvalidFleetConfig("node id must be non-empty");
  if (n.cpu_millicores <= 0 || n.mem_mib <= 0) {
    throw InvalidFleetConfig("node " + n.node_id + ": capacities must be positive");
  }
  validate_schedule(n.node_id, n.schedule);
}

}  // namespace

std::vector<NodeSpec> build_fleet(const FleetConfig& config, RngStream& rng) {
  std::vector<NodeSpec> fleet = config.nodes;

  if (config.generate) {
    const FleetGenSpec& gen = *config.generate;
    if (gen.count <= 0) throw InvalidFleetConfig("generator count must be >= 1");
    if (gen.cpu_min <= 0 || gen.cpu_max < gen.cpu_min || gen.mem_min <= 0 ||
        gen.mem_max < gen.mem_min) {
      throw InvalidFleetConfig("generator capacity ranges are malformed");
    }
    if (gen.windows_per_day < 0 || gen.window_len_min < 1 ||
        gen.window_len_max < gen.window_len_min || gen.window_len_max > kTicksPerDay) {
      throw InvalidFleetConfig("generator window ranges are malformed");
    }
    char id[32];
    for (int i = 0; i < gen.count; ++i) {
      NodeSpec n;
      std::snprintf(id, sizeof(id), "node-%03d", i);
      n.node_id = id;
      n.cpu_millicores = rng.uniform_int(gen.cpu_min, gen.cpu_max);
      n.mem_mib = rng.uniform_int(gen.mem_min, gen.mem_max);
      n.schedule.flip_noise_p = gen.flip_noise_p;
      // Each window is drawn inside its own equal slice of the day so the
      // result is sorted and non-overlapping by construction.
      if (gen.windows_per_day > 0) {
        const Tick slice = kTicksPerDay / gen.windows_per_day;
        for (int w = 0; w < gen.windows_per_day; ++w) {
          const Tick len =
              std::min(slice, rng.uniform_int(gen.window_len_min, gen.window_len_max));
          const Tick offset = rng.uniform_int(0, slice - len);
          n.schedule.on_windows.push_back(
              AvailabilityWindow{w * slice + offset, w * slice + offset + len});
        }
      }
      fleet.push_back(std::move(n));
    }
  }

  if (fleet.empty()) throw InvalidFleetConfig("fleet must contain at least one node");
  std::set<std::string> ids;
  for (const NodeSpec& n : fleet) {
    validate_node(n);
    if (!ids.insert(n.node_id).second) {
      throw InvalidFleetConfig("duplicate node id: " + n.node_id);
    }
  }
  return fleet;
}

bool schedule_on(const AvailabilitySchedule& s, Tick t) {
  const Tick tod = tick_of_day(t);
  for (const auto& w : s.on_windows) {
    if (tod >= w.start && tod < w.end) return true;
  }
  return false;
}

bool in_outage(const AvailabilitySchedule& s, Tick t) {
  for (const auto& o : s.outages) {
    if (t >= o.start && t < o.start + o.duration) return true;
  }
  return false;
}

NodeState node_status_at(const AvailabilitySchedule& s, Tick t, const StatusNoise& noise,
                         std::uint64_t node_key) {
  if (in_outage(s, t)) return NodeState::kOff;
  bool on = schedule_on(s, t);
  if (s.flip_noise_p > 0.0 && noise.unit(node_key, t) < s.flip_noise_p) on = !on;
  return on ? NodeState::kOn : NodeState::kOff;
}

FleetEmulator::FleetEmulator(std::vector<NodeSpec> nodes, std::uint64_t root_seed,
                             const SimClock* clock)
    : noise_(root_seed), clock_(clock) {
  for (NodeSpec& n : nodes) {
    NodeRt rt;
    rt.key = fnv1a64(n.node_id);
    rt.spec = std::move(n);
    const std::string id = rt.spec.node_id;
    if (!by_id_.emplace(id, std::move(rt)).second) {
      throw InvalidFleetConfig("duplicate node id: " + id);
    }
  }
  for (const auto& [id, _] : by_id_) node_ids_.push_back(id);
}

FleetEmulator::NodeRt& FleetEmulator::rt(const std::string& node_id) {
  auto it = by_id_.find(node_id);
  if (it == by_id_.end()) throw UnknownNode("unknown node: " + node_id);
  return it->second;
}

const FleetEmulator::NodeRt& FleetEmulator::rt(const std::string& node_id) const {
  auto it = by_id_.find(node_id);
  if (it == by_id_.end()) throw UnknownNode("unknown node: " + node_id);
  return it->second;
}

const NodeSpec& FleetEmulator::spec(const std::string& node_id) const {
  return rt(node_id).spec;
}

NodeState FleetEmulator::status_at(const std::string& node_id, Tick t) const {
  const NodeRt& n = rt(node_id);
  return node_status_at(n.spec.schedule, t, noise_, n.key);
}

void FleetEmulator::emit_reports(MessageBus& bus, Tick t) const {
  for (const auto& [id, n] : by_id_) {
    const NodeState state = node_status_at(n.spec.schedule, t, noise_, n.key);
    bus.publish(kTopicNodeState, StateReport{t, id, state});
    if (state == NodeState::kOn) {
      bus.publish(kTopicNodeResources,
                  ResourceReport{t, id, n.spec.cpu_millicores - n.used_cpu,
                                 n.spec.mem_mib - n.used_mem});
    }
  }
}

void FleetEmulator::inject_outage(const std::string& node_id, Tick start, Tick duration) {
  NodeRt& n = rt(node_id);
  if (clock_ && start < clock_->now()) {
    throw SchedulingInPast("outage must start at or after the current tick");
  }
  if (duration <= 0) throw InvalidFleetConfig("outage duration must be positive");
  n.spec.schedule.outages.push_back(Outage{start, duration});
}

void FleetEmulator::place_service(const std::string& service_id, const std::string& node_id,
                                  std::int64_t cpu, std::int64_t mem) {
  NodeRt& n = rt(node_id);
  if (n.placed.count(service_id)) {
    throw std::logic_error("service already placed on node: " + service_id);
  }
  if (n.used_cpu + cpu > n.spec.cpu_millicores || n.used_mem + mem > n.spec.mem_mib) {
    throw std::logic_error("placement would exceed capacity on node: " + node_id);
  }
  n.placed.emplace(service_id, std::make_pair(cpu, mem));
  n.used_cpu += cpu;
  n.used_mem += mem;
}

void FleetEmulator::remove_service(const std::string& service_id, const std::string& node_id) {
  NodeRt& n = rt(node_id);
  auto it = n.placed.find(service_id);
  if (it == n.placed.end()) {
    throw std::logic_error("service not placed on node: " + service_id);
  }
  n.used_cpu -= it->second.first;
  n.used_mem -= it->second.second;
  n.placed.erase(it);
}

std::int64_t FleetEmulator::free_cpu(const std::string& node_id) const {
  const NodeRt& n = rt(node_id);
  return n.spec.cpu_millicores - n.used_cpu;
}

std::int64_t FleetEmulator::free_mem(const std::string& node_id) const {
  const NodeRt& n = rt(node_id);
  return n.spec.mem_mib - n.used_mem;
}

const std::map<std::string, std::pair<std::int64_t, std::int64_t>>& FleetEmulator::placements(
    const std::string& node_id) const {
  return rt(node_id).placed;
}

}  // namespace edgesim
