#include <doctest.h>

#include "edgesim/errors.hpp"
#include "edgesim/fleet.hpp"
#include "edgesim/monitor.hpp"

using namespace edgesim;

namespace {

NodeSpec windowed(const std::string& id, Tick start, Tick end) {
  NodeSpec n;
  n.node_id = id;
  n.cpu_millicores = 1000;
  n.mem_mib = 1024;
  n.schedule.on_windows = {{start, end}};
  return n;
}

MonitoringService::Predictor echo_predictor() {
  return [](const StatusMatrix& window, Tick issued_at) {
    PredictionResponse resp;
    resp.issued_at = issued_at;
    resp.target_tick = issued_at + 1;
    resp.node_ids = window.node_ids;
    for (std::size_t i = 0; i < window.node_ids.size(); ++i) {
      const std::uint8_t last = window.at(i, window.ticks.size() - 1);
      resp.probabilities.push_back(last ? 1.0 : 0.0);
      resp.statuses.push_back(last ? NodeState::kOn : NodeState::kOff);
    }
    return resp;
  };
}

}  // namespace

TEST_SUITE("monitor") {

TEST_CASE("telemetry flows from the bus into the store") {
  SimLoop loop;
  FleetEmulator fleet({windowed("a", 0, 1440), windowed("b", 0, 100)}, 1, &loop.clock());
  TimeSeriesStore store;
  MonitoringService monitor(store, {15, 0, 4});
  monitor.attach(loop);
  loop.every_tick(0, [&](Tick t) { fleet.emit_reports(loop.bus(), t); });
  loop.run_until(10);
  CHECK(store.size() == 20);
}

TEST_CASE("relay publishes floor((T - warmup) / P) predictions") {
  struct Case {
    Tick duration, warmup, interval;
  };
  for (const Case c : {Case{300, 39, 15}, Case{310, 39, 15}, Case{100, 0, 7},
                       Case{40, 39, 15}, Case{39, 39, 15}}) {
    SimLoop loop;
    FleetEmulator fleet({windowed("a", 0, 1440)}, 1, &loop.clock());
    TimeSeriesStore store;
    MonitoringService monitor(store, {c.interval, c.warmup, 4});
    monitor.attach(loop);
    monitor.set_predictor(echo_predictor());

    int published = 0;
    loop.bus().subscribe(kTopicPrediction, [&](const BusMessage&) { ++published; });
    loop.every_tick(0, [&](Tick t) { fleet.emit_reports(loop.bus(), t); });
    loop.every_tick(50, [&](Tick t) { monitor.step(t); });
    loop.run_until(c.duration);

    const Tick expected = c.duration > c.warmup ? (c.duration - c.warmup) / c.interval : 0;
    CHECK(published == expected);
    CHECK(monitor.forwarded_count() == static_cast<std::uint64_t>(expected));
  }
}

TEST_CASE("requesting a prediction without a model fails") {
  TimeSeriesStore store;
  MonitoringService monitor(store, {15, 0, 4});
  CHECK_THROWS_AS(monitor.request_and_forward_prediction(10), ModelUnavailable);
}

TEST_CASE("requesting a prediction before seq_len history fails") {
  TimeSeriesStore store;
  store.register_node("a");
  MonitoringService monitor(store, {15, 0, 8});
  monitor.set_predictor(echo_predictor());
  CHECK_THROWS_AS(monitor.request_and_forward_prediction(7), InsufficientHistory);
  // t == seq_len is the first legal request.
  store.ingest(StateReport{8, "a", NodeState::kOn});
  CHECK_NOTHROW(monitor.request_and_forward_prediction(8));
}

TEST_CASE("the relayed window is the most recent seq_len ticks") {
  SimLoop loop;
  TimeSeriesStore store;
  store.register_node("a");
  for (Tick t = 0; t <= 20; ++t) {
    store.ingest(StateReport{t, "a", t >= 17 ? NodeState::kOn : NodeState::kOff});
  }
  MonitoringService monitor(store, {5, 0, 4});
  monitor.set_node_order({"a"});
  monitor.attach(loop);

  PredictionResponse seen;
  loop.bus().subscribe(kTopicPrediction, [&](const BusMessage& msg) {
    seen = std::get<PredictionResponse>(msg.payload);
  });
  monitor.set_predictor([](const StatusMatrix& window, Tick issued_at) {
    REQUIRE(window.ticks.size() == 4);
    CHECK(window.ticks.front() == 17);
    CHECK(window.ticks.back() == 20);
    PredictionResponse resp;
    resp.issued_at = issued_at;
    resp.target_tick = issued_at + 3;
    resp.node_ids = window.node_ids;
    resp.probabilities = {1.0};
    resp.statuses = {NodeState::kOn};
    return resp;
  });
  monitor.request_and_forward_prediction(20);
  loop.run_until(1);
  CHECK(seen.issued_at == 20);
  CHECK(seen.target_tick == 23);
}

}  // TEST_SUITE
