#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "edgesim/lstm.hpp"
#include "edgesim/sim.hpp"
#include "edgesim/store.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

// Collects node.state telemetry into the store and periodically requests a
// prediction and forwards it on prediction.response.
class MonitoringService {
 public:
  struct Options {
    Tick prediction_interval = 15;  // P
    Tick warmup = 0;                // first relay fires at warmup + P - 1
    Tick seq_len = 24;
  };

  MonitoringService(TimeSeriesStore& store, Options options);

  // Subscribes to node.state; the relay step must be registered by the
  // caller at the desired tick phase.
  void attach(SimLoop& loop);

  // A predictor maps the most recent seq_len-tick window to a response.
  using Predictor = std::function<PredictionResponse(const StatusMatrix&, Tick issued_at)>;

  void set_predictor(Predictor predictor) { predictor_ = std::move(predictor); }
  void set_model(std::shared_ptr<const LstmParams> model);
  bool has_predictor() const { return static_cast<bool>(predictor_); }

  // Node order used for prediction windows (lexicographic).
  void set_node_order(std::vector<std::string> node_order) { node_order_ = std::move(node_order); }

  // Cadence gate: fires every P ticks once warmup has passed, so a run of T
  // ticks sees floor((T - warmup) / P) predictions.
  bool due(Tick t) const {
    return t >= options_.warmup && (t - options_.warmup + 1) % options_.prediction_interval == 0;
  }

  // Relay step: if due and a predictor is available, forward one prediction.
  void step(Tick t);

  // Builds the seq_len window ending at t, queries the predictor, and
  // publishes the response.
  void request_and_forward_prediction(Tick t);

  std::uint64_t forwarded_count() const { return forwarded_; }

 private:
  TimeSeriesStore& store_;
  Options options_;
  Predictor predictor_;
  std::vector<std::string> node_order_;
  MessageBus* bus_ = nullptr;
  std::uint64_t forwarded_ = 0;
};

}  // namespace edgesim
