#include "edgesim/monitor.hpp"

#include "edgesim/errors.hpp"

namespace edgesim {

MonitoringService::MonitoringService(TimeSeriesStore& store, Options options)
    : store_(store), options_(options) {
  if (options_.prediction_interval < 1) throw Error("prediction interval must be >= 1");
  if (options_.seq_len < 1) throw Error("seq_len must be >= 1");
}

void MonitoringService::attach(SimLoop& loop) {
  bus_ = &loop.bus();
  bus_->subscribe(kTopicNodeState, [this](const BusMessage& msg) {
    store_.ingest(std::get<StateReport>(msg.payload));
  });
}

void MonitoringService::set_model(std::shared_ptr<const LstmParams> model) {
  if (!model) {
    predictor_ = nullptr;
    return;
  }
  predictor_ = [model](const StatusMatrix& window, Tick issued_at) {
    return predict(*model, window, issued_at, model->horizon);
  };
}

void MonitoringService::step(Tick t) {
  if (!predictor_ || !due(t)) return;
  if (t < options_.seq_len) return;  // no window to forward yet
  request_and_forward_prediction(t);
}

void MonitoringService::request_and_forward_prediction(Tick t) {
  if (!predictor_) throw ModelUnavailable("no prediction model is loaded");
  if (t < options_.seq_len) {
    throw InsufficientHistory("need at least seq_len ticks of history");
  }
  const std::vector<std::string> order =
      node_order_.empty() ? store_.known_nodes() : node_order_;
  const StatusMatrix window = store_.query_range(order, t - options_.seq_len + 1, t, 1);
  PredictionResponse resp = predictor_(window, t);
  ++forwarded_;
  if (bus_) bus_->publish(kTopicPrediction, std::move(resp));
}

}  // namespace edgesim
