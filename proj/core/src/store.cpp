#include "edgesim/store.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "edgesim/errors.hpp"
#include "edgesim/jsonl.hpp"

namespace edgesim {

void TimeSeriesStore::register_node(const std::string& node_id) {
  if (node_id.empty()) throw MalformedReport("node id must be non-empty");
  series_.try_emplace(node_id);
}

TimeSeriesStore::Ack TimeSeriesStore::ingest(const StateReport& report) {
  if (report.container_id.empty()) throw MalformedReport("missing container_id");
  if (report.timestamp < 0) throw MalformedReport("negative timestamp");

  auto& rows = series_[report.container_id];
  auto it = std::lower_bound(
      rows.begin(), rows.end(), report.timestamp,
      [](const std::pair<Tick, NodeState>& row, Tick t) { return row.first < t; });
  if (it != rows.end() && it->first == report.timestamp) {
    if (it->second != report.state) {
      throw ConflictingReport("conflicting state for " + report.container_id + " at tick " +
                              std::to_string(report.timestamp));
    }
    return Ack{false};
  }
  rows.insert(it, {report.timestamp, report.state});
  ++rows_;
  return Ack{true};
}

StatusMatrix TimeSeriesStore::query_range(const std::vector<std::string>& node_ids, Tick t0,
                                          Tick t1, Tick step) const {
  if (t0 > t1) throw Error("query_range requires t0 <= t1");
  if (step < 1) throw Error("query_range requires step >= 1");

  StatusMatrix m;
  m.node_ids = node_ids;
  for (Tick t = t0; t <= t1; t += step) m.ticks.push_back(t);
  m.values.assign(node_ids.size() * m.ticks.size(), 0);

  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    auto it = series_.find(node_ids[i]);
    if (it == series_.end()) throw UnknownNode("unknown node: " + node_ids[i]);
    const auto& rows = it->second;
    // Jump to the first row past t0; everything before it is LOCF context.
    std::size_t r = static_cast<std::size_t>(
        std::upper_bound(rows.begin(), rows.end(), t0,
                         [](Tick t, const std::pair<Tick, NodeState>& row) {
                           return t < row.first;
                         }) -
        rows.begin());
    NodeState last = r > 0 ? rows[r - 1].second : NodeState::kOff;  // cold start: OFF
    for (std::size_t j = 0; j < m.ticks.size(); ++j) {
      while (r < rows.size() && rows[r].first <= m.ticks[j]) last = rows[r++].second;
      m.values[i * m.ticks.size() + j] = static_cast<std::uint8_t>(last);
    }
  }
  return m;
}

std::vector<std::string> TimeSeriesStore::known_nodes() const {
  std::vector<std::string> ids;
  ids.reserve(series_.size());
  for (const auto& [id, _] : series_) ids.push_back(id);
  return ids;
}

std::pair<Tick, Tick> TimeSeriesStore::tick_range() const {
  if (rows_ == 0) throw Error("the store is empty");
  Tick lo = std::numeric_limits<Tick>::max();
  Tick hi = std::numeric_limits<Tick>::min();
  for (const auto& [_, rows] : series_) {
    if (rows.empty()) continue;
    lo = std::min(lo, rows.front().first);
    hi = std::max(hi, rows.back().first);
  }
  return {lo, hi};
}

void TimeSeriesStore::dump_jsonl(std::ostream& out) const {
  // Merge per-node series into (tick, id) order.
  std::vector<std::pair<Tick, const std::string*>> index;
  index.reserve(rows_);
  for (const auto& [id, rows] : series_) {
    for (const auto& row : rows) index.emplace_back(row.first, &id);
  }
  std::stable_sort(index.begin(), index.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [tick, id] : index) {
    const auto& rows = series_.at(*id);
    auto it = std::lower_bound(
        rows.begin(), rows.end(), tick,
        [](const std::pair<Tick, NodeState>& row, Tick t) { return row.first < t; });
    out << dump_deterministic(to_json(StateReport{tick, *id, it->second})) << '\n';
  }
}

TimeSeriesStore TimeSeriesStore::load_jsonl(std::istream& in) {
  TimeSeriesStore store;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw MalformedReport("store dump line is not valid JSON");
    store.ingest(state_report_from_json(j));
  }
  return store;
}

}  // namespace edgesim
