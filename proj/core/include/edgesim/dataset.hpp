#pragma once

#include <Eigen/Core>
#include <vector>

#include "edgesim/store.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

struct TimeEncoding {
  double sin_t = 0.0;
  double cos_t = 0.0;
};

// Cyclic time-of-day encoding: phi = 2*pi*(t mod day_len)/day_len.
TimeEncoding encode_time(Tick t, Tick day_len = kTicksPerDay);

// Model input for one tick window: rows are [sin, cos, status per node in
// matrix order], one column per tick.
Eigen::MatrixXd encode_window(const StatusMatrix& window, Tick day_len = kTicksPerDay);

// (sequence of features ending at end_tick, statuses at end_tick + horizon).
struct TrainingSample {
  Eigen::MatrixXd inputs;  // (N + 2) x seq_len
  Eigen::VectorXd label;   // N
  Tick end_tick = 0;
};

// One sample per end tick in [t0 + seq_len - 1, t1 - horizon], chronological.
// Statuses come from the store with LOCF resampling, so labels equal
// query_range at end_tick + horizon column-for-column.
std::vector<TrainingSample> build_dataset(const TimeSeriesStore& store,
                                          const std::vector<std::string>& node_ids, Tick t0,
                                          Tick t1, Tick seq_len, Tick horizon);

}  // namespace edgesim
