#include "edgesim/metrics.hpp"

#include <cstdio>
#include <ostream>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void PredictorMetrics::add(bool predicted_off, bool actually_off) {
  if (predicted_off && actually_off) ++tp;
  else if (predicted_off && !actually_off) ++fp;
  else if (!predicted_off && actually_off) ++fn;
  else ++tn;
}

double PredictorMetrics::precision() const {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double PredictorMetrics::recall() const {
  return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double PredictorMetrics::accuracy() const {
  return total() == 0 ? 1.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
}

Tick RunMetrics::total_downtime() const {
  Tick sum = 0;
  for (const auto& [_, m] : services) sum += m.downtime_ticks();
  return sum;
}

std::uint64_t RunMetrics::total_migrations(MigrationReason r) const {
  std::uint64_t sum = 0;
  for (const auto& [_, m] : services) sum += m.migration_count(r);
  return sum;
}

void write_metrics_csv(std::ostream& out, const RunMetrics& metrics) {
  out << "service_id,downtime_ticks,pending_ticks,running_ticks,"
         "migrating_unavailable_ticks,off_host_ticks,migrations_initial,"
         "migrations_node_off,migrations_predicted_off,migrations_better_score,"
         "availability,precision,recall,accuracy\n";
  for (const auto& [id, m] : metrics.services) {
    out << id << ',' << m.downtime_ticks() << ',' << m.pending_ticks << ','
        << m.running_ticks << ',' << m.migrating_unavailable_ticks << ','
        << m.off_host_ticks << ',' << m.migration_count(MigrationReason::kInitialPlacement)
        << ',' << m.migration_count(MigrationReason::kNodeOff) << ','
        << m.migration_count(MigrationReason::kPredictedOff) << ','
        << m.migration_count(MigrationReason::kBetterScore) << ",,,,\n";
  }
  out << "__fleet__,,,,,,,,,," << fmt6(metrics.fleet_availability) << ",,,\n";
  out << "__predictor__,,,,,,,,,,,";
  if (metrics.predictor.total() > 0) {
    out << fmt6(metrics.predictor.precision()) << ',' << fmt6(metrics.predictor.recall()) << ','
        << fmt6(metrics.predictor.accuracy());
  } else {
    out << ",,";
  }
  out << '\n';
}

PredictorMetrics score_predictions(const std::vector<LabeledStatus>& predictions,
                                   const std::vector<LabeledStatus>& ground_truth) {
  if (predictions.size() != ground_truth.size()) {
    throw MisalignedSeries("prediction and truth series differ in length");
  }
  PredictorMetrics m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const LabeledStatus& p = predictions[i];
    const LabeledStatus& t = ground_truth[i];
    if (p.node_id != t.node_id || p.tick != t.tick) {
      throw MisalignedSeries("prediction and truth series disagree on (node, tick) pairs");
    }
    m.add(p.state == NodeState::kOff, t.state == NodeState::kOff);
  }
  return m;
}

}  // namespace edgesim
