#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/rng.hpp"
#include "edgesim/sim.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

// Half-open [start, end) interval of ticks within one day.
struct AvailabilityWindow {
  Tick start = 0;
  Tick end = 0;
};

struct Outage {
  Tick start = 0;
  Tick duration = 0;
};

struct AvailabilitySchedule {
  std::vector<AvailabilityWindow> on_windows;  // sorted, non-overlapping
  double flip_noise_p = 0.0;
  std::vector<Outage> outages;
};

struct NodeSpec {
  std::string node_id;
  std::int64_t cpu_millicores = 0;
  std::int64_t mem_mib = 0;
  AvailabilitySchedule schedule;
};

// Seed-driven fleet generation parameters (alternative to explicit nodes).
struct FleetGenSpec {
  int count = 0;
  std::int64_t cpu_min = 1000, cpu_max = 4000;
  std::int64_t mem_min = 1024, mem_max = 4096;
  int windows_per_day = 1;
  Tick window_len_min = 240, window_len_max = 720;
  double flip_noise_p = 0.0;
};

struct FleetConfig {
  std::vector<NodeSpec> nodes;
  std::optional<FleetGenSpec> generate;
};

// Validates and materializes the fleet. Explicit nodes keep config order;
// generated nodes get zero-padded ids so lexicographic order matches
// numeric order. Deterministic given (config, rng seed).
std::vector<NodeSpec> build_fleet(const FleetConfig& config, RngStream& rng);

// Counter-based noise source: one pure draw per (node, tick), so ground
// truth is random-access (the oracle policy reads future statuses without
// perturbing the emulation).
class StatusNoise {
 public:
  explicit StatusNoise(std::uint64_t root_seed)
      : seed_(mix64(root_seed ^ fnv1a64("churn"))) {}

  double unit(std::uint64_t node_key, Tick t) const {
    return unit_from_bits(mix64(mix64(seed_ ^ node_key) ^ static_cast<std::uint64_t>(t)));
  }

 private:
  std::uint64_t seed_;
};

bool schedule_on(const AvailabilitySchedule& s, Tick t);  // daily windows only
bool in_outage(const AvailabilitySchedule& s, Tick t);

// Ground-truth status: outages force OFF; otherwise the window-derived base
// is flipped with probability flip_noise_p using the (node, t) draw.
NodeState node_status_at(const AvailabilitySchedule& s, Tick t, const StatusNoise& noise,
                         std::uint64_t node_key);

// The volatile fleet: evaluates per-tick status, emits node-initiated
// telemetry, and hosts placed services (the actuation target).
class FleetEmulator {
 public:
  FleetEmulator(std::vector<NodeSpec> nodes, std::uint64_t root_seed,
                const SimClock* clock = nullptr);

  const std::vector<std::string>& node_ids() const { return node_ids_; }  // lex order
  const NodeSpec& spec(const std::string& node_id) const;

  NodeState status_at(const std::string& node_id, Tick t) const;

  // One StateReport per node; one ResourceReport per ON node.
  void emit_reports(MessageBus& bus, Tick t) const;

  void inject_outage(const std::string& node_id, Tick start, Tick duration);

  // Actuation: placements debit/credit free resources.
  void place_service(const std::string& service_id, const std::string& node_id,
                     std::int64_t cpu, std::int64_t mem);
  void remove_service(const std::string& service_id, const std::string& node_id);

  std::int64_t free_cpu(const std::string& node_id) const;
  std::int64_t free_mem(const std::string& node_id) const;
  const std::map<std::string, std::pair<std::int64_t, std::int64_t>>& placements(
      const std::string& node_id) const;

 private:
  struct NodeRt {
    NodeSpec spec;
    std::uint64_t key;
    std::int64_t used_cpu = 0;
    std::int64_t used_mem = 0;
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> placed;  // svc -> (cpu, mem)
  };

  NodeRt& rt(const std::string& node_id);
  const NodeRt& rt(const std::string& node_id) const;

  std::vector<std::string> node_ids_;
  std::map<std::string, NodeRt> by_id_;
  StatusNoise noise_;
  const SimClock* clock_;
};

}  // namespace edgesim
