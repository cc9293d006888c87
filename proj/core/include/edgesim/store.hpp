#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "edgesim/events.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

// node x tick binary status matrix, resampled with LOCF.
struct StatusMatrix {
  std::vector<std::string> node_ids;
  std::vector<Tick> ticks;
  std::vector<std::uint8_t> values;  // row-major, node-major

  std::uint8_t at(std::size_t node, std::size_t tick) const {
    return values[node * ticks.size() + tick];
  }
};

// Append-only telemetry store: at most one state per (container_id,
// timestamp), no updates or deletes. Plays the time-series database role.
class TimeSeriesStore {
 public:
  void register_node(const std::string& node_id);

  struct Ack {
    bool appended = false;  // false for idempotent duplicates
  };

  // Duplicate (id, ts, state) is a no-op; same (id, ts) with a different
  // state is a conflict. Out-of-order timestamps are accepted.
  Ack ingest(const StateReport& report);

  // Value at tick = most recent report at or before it; OFF before the
  // first report. Ticks are t0, t0+step, ... <= t1.
  StatusMatrix query_range(const std::vector<std::string>& node_ids, Tick t0, Tick t1,
                           Tick step = 1) const;

  std::size_t size() const { return rows_; }
  bool knows(const std::string& node_id) const { return series_.count(node_id) > 0; }
  std::vector<std::string> known_nodes() const;  // lex order

  // (earliest, latest) stored tick; requires a non-empty store.
  std::pair<Tick, Tick> tick_range() const;

  void dump_jsonl(std::ostream& out) const;       // chronological, id-tiebroken
  static TimeSeriesStore load_jsonl(std::istream& in);

 private:
  // Sorted by tick; append at the end is the fast path.
  std::map<std::string, std::vector<std::pair<Tick, NodeState>>> series_;
  std::size_t rows_ = 0;
};

}  // namespace edgesim
