#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/events.hpp"
#include "edgesim/fleet.hpp"
#include "edgesim/sim.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

struct ServiceSpec {
  std::string service_id;
  std::int64_t cpu_millicores = 0;
  std::int64_t mem_mib = 0;
};

struct ScoreWeights {
  double w_cpu = 0.5;
  double w_mem = 0.5;
};

struct NodeView {
  NodeState state = NodeState::kOff;
  std::int64_t free_cpu = 0;
  std::int64_t free_mem = 0;
  bool tainted = false;
  std::string taint_reason;
};

// Snapshot the scoring and placement rules operate on.
struct ClusterView {
  std::map<std::string, NodeView> nodes;
  std::map<std::string, std::string> placements;  // service -> node
  std::optional<PredictionResponse> latest_prediction;
};

// Normalized weighted free-capacity score in [0, 1]; maxima are taken over
// ON untainted nodes, and a zero maximum zeroes that term.
double score_node(const ClusterView& view, const std::string& node_id,
                  const ScoreWeights& weights = {});

// ON, untainted nodes that fit the request, by descending score, ties by
// ascending node id.
std::vector<std::string> feasible_nodes(const ClusterView& view, const ServiceSpec& service,
                                        const ScoreWeights& weights = {});

// Picks the head of feasible_nodes, debits the view, and records the
// placement.
std::string place(ClusterView& view, const ServiceSpec& service,
                  const ScoreWeights& weights = {});

void taint(ClusterView& view, const std::string& node_id, const std::string& reason);
void untaint(ClusterView& view, const std::string& node_id);

enum class ServiceState : std::uint8_t { kPending, kRunning, kMigrating };

// The DE + Actuator: listens to telemetry and predictions, keeps services
// off dead nodes, and migrates ahead of predicted outages.
class DecisionEngine {
 public:
  struct Config {
    ScoreWeights weights;
    double hysteresis = 0.2;   // BETTER_SCORE margin (rule c)
    Tick migration_ticks = 2;  // D
  };

  struct ServiceStatus {
    ServiceSpec spec;
    ServiceState state = ServiceState::kPending;
    std::string node;       // host while Running
    std::string last_host;  // previous host while Pending ("" if never placed)
    bool pending_host_off = false;
    // Migration in flight:
    std::string mig_from, mig_to;
    Tick mig_start = 0;
    Tick mig_duration = 0;
    // True only when the migration left a running instance behind (live
    // pre-copy); reactive placements of pending services have no source
    // copy and stay unavailable for the whole duration.
    bool mig_live_source = false;
  };

  DecisionEngine(FleetEmulator& fleet, Config config);

  // Subscribes to node.state / node.resources / prediction.response; the
  // per-tick step must be registered by the caller.
  void attach(SimLoop& loop);

  // Direct ingestion (what the subscriptions call).
  void ingest(const StateReport& report);
  void ingest(const ResourceReport& report);
  void ingest(const PredictionResponse& response);

  void add_service(const ServiceSpec& spec);

  // One decision round: finish due migrations, abort lost destinations,
  // reconcile, plan, execute.
  void step(Tick now);

  // Individual phases, exposed for direct-driving tests.
  void complete_migrations(Tick now);
  void abort_lost_destinations(Tick now);
  void reconcile(Tick now);
  std::vector<MigrationAction> plan(Tick now);
  void execute(const std::vector<MigrationAction>& actions, Tick now);

  void taint_node(const std::string& node_id, const std::string& reason);
  void untaint_node(const std::string& node_id);

  const ClusterView& view() const { return view_; }
  const std::map<std::string, ServiceStatus>& services() const { return services_; }
  std::uint64_t aborted_migrations() const { return aborted_; }

 private:
  void refresh_from_fleet(const std::string& node_id);
  void start_migration(const MigrationAction& action, Tick now);
  void refresh_migration_taints(Tick now);

  FleetEmulator& fleet_;
  Config config_;
  MessageBus* bus_ = nullptr;
  ClusterView view_;
  std::map<std::string, ServiceStatus> services_;
  std::map<std::string, std::string> manual_taints_;  // node -> reason
  std::uint64_t aborted_ = 0;
};

}  // namespace edgesim
