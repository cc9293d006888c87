#include "edgesim/dataset.hpp"

#include <cmath>
#include <numbers>

#include "edgesim/errors.hpp"

namespace edgesim {

TimeEncoding encode_time(Tick t, Tick day_len) {
  if (day_len <= 0) throw Error("encode_time requires day_len > 0");
  const Tick tod = ((t % day_len) + day_len) % day_len;
  const double phi =
      2.0 * std::numbers::pi * static_cast<double>(tod) / static_cast<double>(day_len);
  return TimeEncoding{std::sin(phi), std::cos(phi)};
}

Eigen::MatrixXd encode_window(const StatusMatrix& window, Tick day_len) {
  const auto n = static_cast<Eigen::Index>(window.node_ids.size());
  const auto len = static_cast<Eigen::Index>(window.ticks.size());
  Eigen::MatrixXd x(n + 2, len);
  for (Eigen::Index j = 0; j < len; ++j) {
    const TimeEncoding enc = encode_time(window.ticks[static_cast<std::size_t>(j)], day_len);
    x(0, j) = enc.sin_t;
    x(1, j) = enc.cos_t;
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i + 2, j) = static_cast<double>(
          window.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
  }
  return x;
}

std::vector<TrainingSample> build_dataset(const TimeSeriesStore& store,
                                          const std::vector<std::string>& node_ids, Tick t0,
                                          Tick t1, Tick seq_len, Tick horizon) {
  if (seq_len < 1 || horizon < 1) throw Error("seq_len and horizon must be >= 1");
  if (t1 - t0 < seq_len + horizon) {
    throw WindowTooShort("need at least seq_len + horizon ticks of history");
  }

  const StatusMatrix all = store.query_range(node_ids, t0, t1, 1);
  const Eigen::MatrixXd features = encode_window(all);
  const auto n = static_cast<Eigen::Index>(node_ids.size());

  std::vector<TrainingSample> samples;
  samples.reserve(static_cast<std::size_t>(t1 - t0 + 1 - seq_len - horizon + 1));
  for (Tick end = t0 + seq_len - 1; end <= t1 - horizon; ++end) {
    TrainingSample s;
    s.end_tick = end;
    const Eigen::Index first_col = static_cast<Eigen::Index>(end - seq_len + 1 - t0);
    s.inputs = features.block(0, first_col, n + 2, static_cast<Eigen::Index>(seq_len));
    s.label = features.block(2, static_cast<Eigen::Index>(end + horizon - t0), n, 1);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace edgesim
