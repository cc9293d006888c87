#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "edgesim/events.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

// Confusion-matrix metrics with OFF as the positive class (outages are the
// rare, costly event). Empty denominators count as vacuously perfect.
struct PredictorMetrics {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  void add(bool predicted_off, bool actually_off);
  std::uint64_t total() const { return tp + fp + tn + fn; }
  double precision() const;
  double recall() const;
  double accuracy() const;
};

struct ServiceMetrics {
  Tick start_tick = 0;  // when the service entered planning
  Tick running_ticks = 0;
  Tick migrating_unavailable_ticks = 0;
  Tick pending_ticks = 0;
  Tick off_host_ticks = 0;  // safety violations; stays 0 under reconcile
  std::map<MigrationReason, std::uint64_t> migrations;

  Tick downtime_ticks() const {
    return migrating_unavailable_ticks + pending_ticks + off_host_ticks;
  }
  std::uint64_t migration_count(MigrationReason r) const {
    auto it = migrations.find(r);
    return it == migrations.end() ? 0 : it->second;
  }
};

struct RunMetrics {
  std::map<std::string, ServiceMetrics> services;
  double fleet_availability = 0.0;  // ON node-ticks / (nodes x eval ticks)
  PredictorMetrics predictor;
  Tick eval_start = 0;
  Tick duration_ticks = 0;

  Tick total_downtime() const;
  std::uint64_t total_migrations(MigrationReason r) const;
};

// One row per service, then __fleet__ and __predictor__ summary rows.
void write_metrics_csv(std::ostream& out, const RunMetrics& metrics);

// A single (node, tick) status observation.
struct LabeledStatus {
  std::string node_id;
  Tick tick = 0;
  NodeState state = NodeState::kOff;
};

// Requires the two series to list identical (node, tick) pairs in the same
// order.
PredictorMetrics score_predictions(const std::vector<LabeledStatus>& predictions,
                                   const std::vector<LabeledStatus>& ground_truth);

}  // namespace edgesim
