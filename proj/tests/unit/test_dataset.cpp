#include <doctest.h>

#include <cmath>

#include "edgesim/dataset.hpp"
#include "edgesim/errors.hpp"

using namespace edgesim;

TEST_SUITE("dataset") {

TEST_CASE("encode_time hits the cardinal points") {
  const auto midnight = encode_time(0, 1440);
  CHECK(midnight.sin_t == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(midnight.cos_t == doctest::Approx(1.0).epsilon(1e-12));

  const auto six = encode_time(360, 1440);
  CHECK(six.sin_t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(six.cos_t == doctest::Approx(0.0).epsilon(1e-12));

  const auto noon = encode_time(720, 1440);
  CHECK(noon.sin_t == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(noon.cos_t == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("encoding is exactly day-periodic and unit-norm") {
  for (Tick t = 0; t < 1440; t += 37) {
    const auto a = encode_time(t);
    const auto b = encode_time(t + kTicksPerDay);
    CHECK(a.sin_t == b.sin_t);  // bitwise: same tick-of-day, same angle
    CHECK(a.cos_t == b.cos_t);
    CHECK(a.sin_t * a.sin_t + a.cos_t * a.cos_t == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sample count follows the window arithmetic") {
  TimeSeriesStore store;
  for (Tick t = 0; t < 100; ++t) {
    store.ingest(StateReport{t, "n1", t % 2 ? NodeState::kOn : NodeState::kOff});
  }
  const auto samples = build_dataset(store, {"n1"}, 0, 99, 10, 5);
  CHECK(samples.size() == 86);
  // Chronological end ticks.
  CHECK(samples.front().end_tick == 9);
  CHECK(samples.back().end_tick == 94);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    CHECK(samples[i].end_tick == samples[i - 1].end_tick + 1);
  }
}

TEST_CASE("too-short history is rejected") {
  TimeSeriesStore store;
  for (Tick t = 0; t < 14; ++t) store.ingest(StateReport{t, "n1", NodeState::kOn});
  CHECK_THROWS_AS(build_dataset(store, {"n1"}, 0, 13, 10, 5), WindowTooShort);
}

TEST_CASE("an always-ON node labels to all ones") {
  TimeSeriesStore store;
  store.register_node("off");
  for (Tick t = 0; t < 60; ++t) store.ingest(StateReport{t, "on", NodeState::kOn});
  const auto samples = build_dataset(store, {"off", "on"}, 0, 59, 8, 4);
  REQUIRE(!samples.empty());
  for (const auto& s : samples) {
    CHECK(s.label(0) == 0.0);
    CHECK(s.label(1) == 1.0);
  }
}

TEST_CASE("labels equal the query_range column at end_tick + horizon") {
  TimeSeriesStore store;
  // Deterministic but irregular pattern.
  for (Tick t = 0; t < 80; ++t) {
    store.ingest(StateReport{t, "a", (t * 7) % 5 < 2 ? NodeState::kOn : NodeState::kOff});
    store.ingest(StateReport{t, "b", (t * 3) % 4 == 0 ? NodeState::kOn : NodeState::kOff});
  }
  const Tick seq_len = 6, horizon = 3;
  const auto samples = build_dataset(store, {"a", "b"}, 0, 79, seq_len, horizon);
  const StatusMatrix truth = store.query_range({"a", "b"}, 0, 79, 1);
  for (const auto& s : samples) {
    const auto col = static_cast<std::size_t>(s.end_tick + horizon);
    CHECK(s.label(0) == static_cast<double>(truth.at(0, col)));
    CHECK(s.label(1) == static_cast<double>(truth.at(1, col)));
    // Sequence statuses match the matrix too, and time features match ticks.
    for (Tick k = 0; k < seq_len; ++k) {
      const Tick tick = s.end_tick - seq_len + 1 + k;
      const auto enc = encode_time(tick);
      CHECK(s.inputs(0, k) == enc.sin_t);
      CHECK(s.inputs(1, k) == enc.cos_t);
      CHECK(s.inputs(2, k) == static_cast<double>(truth.at(0, static_cast<std::size_t>(tick))));
      CHECK(s.inputs(3, k) == static_cast<double>(truth.at(1, static_cast<std::size_t>(tick))));
    }
  }
}

}  // TEST_SUITE
