#include <benchmark/benchmark.h>

#include "edgesim/dataset.hpp"
#include "edgesim/lstm.hpp"
#include "edgesim/runner.hpp"
#include "edgesim/scheduler.hpp"
#include "edgesim/sim.hpp"
#include "edgesim/store.hpp"

namespace {

using namespace edgesim;

std::vector<TrainingSample> bench_batch(Eigen::Index nodes, Tick seq_len, int batch) {
  RngStream rng = fork_rng(1, "bench-batch");
  std::vector<TrainingSample> out;
  for (int b = 0; b < batch; ++b) {
    TrainingSample s;
    s.inputs = Eigen::MatrixXd(nodes + 2, seq_len);
    for (Tick t = 0; t < seq_len; ++t) {
      const TimeEncoding enc = encode_time(t * 13 % kTicksPerDay);
      s.inputs(0, t) = enc.sin_t;
      s.inputs(1, t) = enc.cos_t;
      for (Eigen::Index i = 2; i < nodes + 2; ++i) {
        s.inputs(i, t) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      }
    }
    s.label = Eigen::VectorXd(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) s.label(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

void BM_lstm_forward(benchmark::State& state) {
  const auto nodes = static_cast<Eigen::Index>(state.range(0));
  RngStream rng = fork_rng(2, "bench-params");
  LstmParams params = LstmParams::init({nodes + 2, 32, nodes}, {}, 24, 15, rng);
  const auto batch = bench_batch(nodes, 24, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lstm_forward(params, batch[0].inputs));
  }
}
BENCHMARK(BM_lstm_forward)->Arg(10)->Arg(20)->Arg(50);

void BM_lstm_loss_and_grad(benchmark::State& state) {
  const auto batch_size = static_cast<int>(state.range(0));
  RngStream rng = fork_rng(3, "bench-params");
  LstmParams params = LstmParams::init({12, 32, 10}, {}, 24, 15, rng);
  const auto batch = bench_batch(10, 24, batch_size);
  LstmGrads grads = LstmGrads::zeros(params.dims);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(params, batch, grads));
  }
  state.SetItemsProcessed(state.iterations() * batch_size);
}
BENCHMARK(BM_lstm_loss_and_grad)->Arg(32)->Arg(128);

void BM_bus_publish_drain(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    SimLoop loop;
    std::uint64_t delivered = 0;
    loop.bus().subscribe(kTopicNodeState, [&](const BusMessage&) { ++delivered; });
    loop.every_tick(0, [&](Tick t) {
      for (int n = 0; n < 20; ++n) {
        loop.bus().publish(kTopicNodeState, StateReport{t, "n", NodeState::kOn});
      }
    });
    state.ResumeTiming();
    loop.run_until(1000);
    benchmark::DoNotOptimize(delivered);
  }
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_bus_publish_drain);

void BM_store_query_range(benchmark::State& state) {
  TimeSeriesStore store;
  std::vector<std::string> ids;
  for (int n = 0; n < 20; ++n) ids.push_back("node-" + std::to_string(n));
  for (Tick t = 0; t < 10000; ++t) {
    for (const auto& id : ids) {
      store.ingest(StateReport{t, id, t % 97 < 50 ? NodeState::kOn : NodeState::kOff});
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.query_range(ids, 8000, 8000 + state.range(0) - 1, 1));
  }
}
BENCHMARK(BM_store_query_range)->Arg(24)->Arg(1440);

void BM_placement(benchmark::State& state) {
  RngStream rng = fork_rng(4, "bench-place");
  ClusterView view;
  for (int n = 0; n < state.range(0); ++n) {
    NodeView node;
    node.state = NodeState::kOn;
    node.free_cpu = rng.uniform_int(100, 4000);
    node.free_mem = rng.uniform_int(128, 8192);
    view.nodes.emplace("node-" + std::to_string(n), node);
  }
  const ServiceSpec svc{"svc", 100, 128};
  for (auto _ : state) {
    ClusterView scratch = view;
    benchmark::DoNotOptimize(place(scratch, svc));
  }
}
BENCHMARK(BM_placement)->Arg(8)->Arg(64);

void BM_full_scenario_tick(benchmark::State& state) {
  ScenarioConfig c;
  c.root_seed = 77;
  c.duration_ticks = 1440;
  c.training_days = 0;
  c.prediction_interval = 15;
  c.policy.kind = PolicyKind::kProactiveOracle;
  FleetGenSpec gen;
  gen.count = 20;
  c.fleet.generate = gen;
  for (int i = 0; i < 10; ++i) c.services.push_back({"svc-" + std::to_string(i), 100, 128});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(c));
  }
  state.SetItemsProcessed(state.iterations() * c.duration_ticks);
}
BENCHMARK(BM_full_scenario_tick)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
