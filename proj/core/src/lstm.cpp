#include "edgesim/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "edgesim/errors.hpp"

namespace edgesim {

namespace {

constexpr double kProbClamp = 1e-7;

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

void fill_uniform(Eigen::MatrixXd& m, RngStream& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform_real(-0.1, 0.1);
  }
}

void fill_uniform(Eigen::VectorXd& v, RngStream& rng) {
  for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = rng.uniform_real(-0.1, 0.1);
}

void check_dims(const LstmParams& p) {
  const auto& d = p.dims;
  if (d.input < 1 || d.hidden < 1 || d.output < 1) {
    throw DimensionMismatch("lstm dims must be positive");
  }
  auto gate_ok = [&](const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                     const Eigen::VectorXd& b) {
    return w.rows() == d.hidden && w.cols() == d.input && u.rows() == d.hidden &&
           u.cols() == d.hidden && b.size() == d.hidden;
  };
  if (!gate_ok(p.w_i, p.u_i, p.b_i) || !gate_ok(p.w_f, p.u_f, p.b_f) ||
      !gate_ok(p.w_g, p.u_g, p.b_g) || !gate_ok(p.w_o, p.u_o, p.b_o) ||
      p.w_y.rows() != d.output || p.w_y.cols() != d.hidden || p.b_y.size() != d.output) {
    throw DimensionMismatch("lstm parameter shapes are inconsistent");
  }
}

// Forward over a batch of equally-long sequences laid out per step as
// input x batch. Shared by loss_and_grad and the single-sequence entry.
void forward_batch(const LstmParams& p, const std::vector<Eigen::MatrixXd>& steps,
                   ForwardCache& cache) {
  const Eigen::Index batch = steps.front().cols();
  const Eigen::Index hidden = p.dims.hidden;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(hidden, batch);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(hidden, batch);

  const std::size_t len = steps.size();
  cache.x = steps;
  cache.gi.resize(len);
  cache.gf.resize(len);
  cache.gg.resize(len);
  cache.go.resize(len);
  cache.c.resize(len);
  cache.h.resize(len);
  cache.tanh_c.resize(len);

  for (std::size_t t = 0; t < len; ++t) {
    const Eigen::MatrixXd& x = steps[t];
    const Eigen::MatrixXd i = sigmoid((p.w_i * x + p.u_i * h).colwise() + p.b_i);
    const Eigen::MatrixXd f = sigmoid((p.w_f * x + p.u_f * h).colwise() + p.b_f);
    const Eigen::MatrixXd g = ((p.w_g * x + p.u_g * h).colwise() + p.b_g).array().tanh();
    const Eigen::MatrixXd o = sigmoid((p.w_o * x + p.u_o * h).colwise() + p.b_o);
    c = (f.array() * c.array() + i.array() * g.array()).matrix();
    const Eigen::MatrixXd tc = c.array().tanh().matrix();
    h = (o.array() * tc.array()).matrix();

    cache.gi[t] = i;
    cache.gf[t] = f;
    cache.gg[t] = g;
    cache.go[t] = o;
    cache.c[t] = c;
    cache.h[t] = h;
    cache.tanh_c[t] = tc;
  }

  cache.probs = sigmoid((p.w_y * h).colwise() + p.b_y);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < v.size(); ++r) arr.push_back(v(r));
  return arr;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                 Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw CorruptModelFile(std::string("bad shape for ") + name);
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw CorruptModelFile(std::string("bad shape for ") + name);
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw CorruptModelFile(std::string("non-numeric entry in ") + name);
      m(r, c) = v.get<double>();
      if (!std::isfinite(m(r, c))) {
        throw CorruptModelFile(std::string("non-finite entry in ") + name);
      }
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index size, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw CorruptModelFile(std::string("bad shape for ") + name);
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index r = 0; r < size; ++r) {
    const auto& e = j[static_cast<std::size_t>(r)];
    if (!e.is_number()) throw CorruptModelFile(std::string("non-numeric entry in ") + name);
    v(r) = e.get<double>();
    if (!std::isfinite(v(r))) throw CorruptModelFile(std::string("non-finite entry in ") + name);
  }
  return v;
}

}  // namespace

LstmParams LstmParams::zeros(LstmDims dims) {
  LstmParams p;
  p.dims = dims;
  p.w_i = p.w_f = p.w_g = p.w_o = Eigen::MatrixXd::Zero(dims.hidden, dims.input);
  p.u_i = p.u_f = p.u_g = p.u_o = Eigen::MatrixXd::Zero(dims.hidden, dims.hidden);
  p.b_i = p.b_f = p.b_g = p.b_o = Eigen::VectorXd::Zero(dims.hidden);
  p.w_y = Eigen::MatrixXd::Zero(dims.output, dims.hidden);
  p.b_y = Eigen::VectorXd::Zero(dims.output);
  return p;
}

LstmParams LstmParams::init(LstmDims dims, std::vector<std::string> node_order, Tick seq_len,
                            Tick horizon, RngStream& rng) {
  LstmParams p = zeros(dims);
  p.node_order = std::move(node_order);
  p.seq_len = seq_len;
  p.horizon = horizon;
  fill_uniform(p.w_i, rng);
  fill_uniform(p.w_f, rng);
  fill_uniform(p.w_g, rng);
  fill_uniform(p.w_o, rng);
  fill_uniform(p.u_i, rng);
  fill_uniform(p.u_f, rng);
  fill_uniform(p.u_g, rng);
  fill_uniform(p.u_o, rng);
  fill_uniform(p.b_i, rng);
  fill_uniform(p.b_f, rng);
  fill_uniform(p.b_g, rng);
  fill_uniform(p.b_o, rng);
  fill_uniform(p.w_y, rng);
  fill_uniform(p.b_y, rng);
  p.b_f.array() += 1.0;  // bias toward remembering at the start of training
  return p;
}

LstmGrads LstmGrads::zeros(const LstmDims& dims) {
  LstmGrads g;
  g.w_i = g.w_f = g.w_g = g.w_o = Eigen::MatrixXd::Zero(dims.hidden, dims.input);
  g.u_i = g.u_f = g.u_g = g.u_o = Eigen::MatrixXd::Zero(dims.hidden, dims.hidden);
  g.b_i = g.b_f = g.b_g = g.b_o = Eigen::VectorXd::Zero(dims.hidden);
  g.w_y = Eigen::MatrixXd::Zero(dims.output, dims.hidden);
  g.b_y = Eigen::VectorXd::Zero(dims.output);
  return g;
}

Eigen::VectorXd lstm_forward(const LstmParams& params, const Eigen::MatrixXd& sequence,
                             ForwardCache* cache) {
  check_dims(params);
  if (sequence.cols() == 0) throw EmptySequence("sequence must be non-empty");
  if (sequence.rows() != params.dims.input) {
    throw DimensionMismatch("sequence width does not match params.input");
  }

  std::vector<Eigen::MatrixXd> steps;
  steps.reserve(static_cast<std::size_t>(sequence.cols()));
  for (Eigen::Index t = 0; t < sequence.cols(); ++t) steps.push_back(sequence.col(t));

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  forward_batch(params, steps, c);
  return c.probs.col(0);
}

double loss_and_grad(const LstmParams& params, const std::vector<TrainingSample>& batch,
                     LstmGrads& grads) {
  check_dims(params);
  if (batch.empty()) throw EmptyBatch("batch must be non-empty");

  const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index n = params.dims.output;
  const auto len = static_cast<std::size_t>(batch.front().inputs.cols());
  for (const TrainingSample& s : batch) {
    if (s.inputs.rows() != params.dims.input || s.label.size() != n ||
        static_cast<std::size_t>(s.inputs.cols()) != len) {
      throw DimensionMismatch("batch sample shape mismatch");
    }
  }
  if (len == 0) throw EmptySequence("sequence must be non-empty");

  // Pack per-step input matrices (input x batch).
  std::vector<Eigen::MatrixXd> steps(len, Eigen::MatrixXd(params.dims.input, b));
  Eigen::MatrixXd labels(n, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const TrainingSample& s = batch[static_cast<std::size_t>(k)];
    for (std::size_t t = 0; t < len; ++t) {
      steps[t].col(k) = s.inputs.col(static_cast<Eigen::Index>(t));
    }
    labels.col(k) = s.label;
  }

  ForwardCache cache;
  forward_batch(params, steps, cache);

  const Eigen::ArrayXXd p =
      cache.probs.array().min(1.0 - kProbClamp).max(kProbClamp);
  const Eigen::ArrayXXd y = labels.array();
  const double denom = static_cast<double>(b) * static_cast<double>(n);
  const double loss = -((y * p.log()) + (1.0 - y) * (1.0 - p).log()).sum() / denom;

  grads = LstmGrads::zeros(params.dims);

  // dL/dz for sigmoid + BCE collapses to (p - y) / (batch * nodes).
  const Eigen::MatrixXd dz = ((cache.probs.array() - y) / denom).matrix();
  grads.w_y = dz * cache.h[len - 1].transpose();
  grads.b_y = dz.rowwise().sum();

  Eigen::MatrixXd dh = params.w_y.transpose() * dz;
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(params.dims.hidden, b);

  for (std::size_t t = len; t-- > 0;) {
    const Eigen::MatrixXd& i = cache.gi[t];
    const Eigen::MatrixXd& f = cache.gf[t];
    const Eigen::MatrixXd& g = cache.gg[t];
    const Eigen::MatrixXd& o = cache.go[t];
    const Eigen::MatrixXd& tc = cache.tanh_c[t];
    const Eigen::MatrixXd c_prev = t > 0 ? cache.c[t - 1]
                                         : Eigen::MatrixXd::Zero(params.dims.hidden, b);
    const Eigen::MatrixXd h_prev = t > 0 ? cache.h[t - 1]
                                         : Eigen::MatrixXd::Zero(params.dims.hidden, b);

    dc.array() += dh.array() * o.array() * (1.0 - tc.array().square());
    const Eigen::MatrixXd da_o =
        (dh.array() * tc.array() * o.array() * (1.0 - o.array())).matrix();
    const Eigen::MatrixXd da_f =
        (dc.array() * c_prev.array() * f.array() * (1.0 - f.array())).matrix();
    const Eigen::MatrixXd da_i =
        (dc.array() * g.array() * i.array() * (1.0 - i.array())).matrix();
    const Eigen::MatrixXd da_g = (dc.array() * i.array() * (1.0 - g.array().square())).matrix();

    const Eigen::MatrixXd& x = cache.x[t];
    grads.w_i.noalias() += da_i * x.transpose();
    grads.w_f.noalias() += da_f * x.transpose();
    grads.w_g.noalias() += da_g * x.transpose();
    grads.w_o.noalias() += da_o * x.transpose();
    grads.u_i.noalias() += da_i * h_prev.transpose();
    grads.u_f.noalias() += da_f * h_prev.transpose();
    grads.u_g.noalias() += da_g * h_prev.transpose();
    grads.u_o.noalias() += da_o * h_prev.transpose();
    grads.b_i += da_i.rowwise().sum();
    grads.b_f += da_f.rowwise().sum();
    grads.b_g += da_g.rowwise().sum();
    grads.b_o += da_o.rowwise().sum();

    dh = params.u_i.transpose() * da_i + params.u_f.transpose() * da_f +
         params.u_g.transpose() * da_g + params.u_o.transpose() * da_o;
    dc = (dc.array() * f.array()).matrix();
  }

  return loss;
}

TrainResult train(const std::vector<TrainingSample>& dataset, const TrainHyper& hyper,
                  std::vector<std::string> node_order) {
  if (dataset.empty()) throw EmptyDataset("training dataset is empty");
  if (hyper.hidden < 1 || hyper.seq_len < 1 || hyper.horizon < 1 || hyper.lr <= 0.0 ||
      hyper.epochs < 0 || hyper.batch_size < 1) {
    throw InvalidHyper("invalid training hyperparameters");
  }

  LstmDims dims{dataset.front().inputs.rows(), hyper.hidden, dataset.front().label.size()};

  RngStream init_rng = fork_rng(hyper.seed, "init");
  TrainResult result;
  result.params = LstmParams::init(dims, std::move(node_order), hyper.seq_len, hyper.horizon,
                                   init_rng);
  LstmParams& p = result.params;

  RngStream shuffle_rng = fork_rng(hyper.seed, "shuffle");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  LstmGrads grads = LstmGrads::zeros(dims);
  std::vector<TrainingSample> batch;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Fisher-Yates with the seeded stream; std::shuffle is not portable.
    for (std::size_t k = order.size(); k > 1; --k) {
      const auto j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(k) - 1));
      std::swap(order[k - 1], order[j]);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(dataset[order[k]]);

      const double loss = loss_and_grad(p, batch, grads);
      epoch_loss += loss * static_cast<double>(stop - start);

      const double lr = hyper.lr;
      p.w_i -= lr * grads.w_i;
      p.w_f -= lr * grads.w_f;
      p.w_g -= lr * grads.w_g;
      p.w_o -= lr * grads.w_o;
      p.u_i -= lr * grads.u_i;
      p.u_f -= lr * grads.u_f;
      p.u_g -= lr * grads.u_g;
      p.u_o -= lr * grads.u_o;
      p.b_i -= lr * grads.b_i;
      p.b_f -= lr * grads.b_f;
      p.b_g -= lr * grads.b_g;
      p.b_o -= lr * grads.b_o;
      p.w_y -= lr * grads.w_y;
      p.b_y -= lr * grads.b_y;
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(dataset.size()));
  }
  return result;
}

PredictionResponse predict(const LstmParams& params, const StatusMatrix& recent_window,
                           Tick issued_at, Tick horizon) {
  if (static_cast<Tick>(recent_window.ticks.size()) != params.seq_len) {
    throw WrongWindowLength("window length must equal the model seq_len");
  }
  if (recent_window.node_ids != params.node_order) {
    throw NodeOrderMismatch("window node order must match the training order");
  }

  const Eigen::VectorXd probs = lstm_forward(params, encode_window(recent_window));

  PredictionResponse resp;
  resp.issued_at = issued_at;
  resp.target_tick = issued_at + horizon;
  resp.node_ids = params.node_order;
  resp.probabilities.assign(probs.data(), probs.data() + probs.size());
  resp.statuses.reserve(resp.probabilities.size());
  for (double p : resp.probabilities) {
    resp.statuses.push_back(p >= 0.5 ? NodeState::kOn : NodeState::kOff);
  }
  return resp;
}

void save_model(const LstmParams& params, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["dims"] = {{"input", params.dims.input},
               {"hidden", params.dims.hidden},
               {"output", params.dims.output}};
  j["node_order"] = params.node_order;
  j["seq_len"] = params.seq_len;
  j["horizon"] = params.horizon;
  j["w_i"] = matrix_to_json(params.w_i);
  j["w_f"] = matrix_to_json(params.w_f);
  j["w_g"] = matrix_to_json(params.w_g);
  j["w_o"] = matrix_to_json(params.w_o);
  j["u_i"] = matrix_to_json(params.u_i);
  j["u_f"] = matrix_to_json(params.u_f);
  j["u_g"] = matrix_to_json(params.u_g);
  j["u_o"] = matrix_to_json(params.u_o);
  j["b_i"] = vector_to_json(params.b_i);
  j["b_f"] = vector_to_json(params.b_f);
  j["b_g"] = vector_to_json(params.b_g);
  j["b_o"] = vector_to_json(params.b_o);
  j["w_y"] = matrix_to_json(params.w_y);
  j["b_y"] = vector_to_json(params.b_y);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out << j.dump(1) << '\n';  // nlohmann round-trips doubles exactly
}

LstmParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorruptModelFile("cannot open model file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CorruptModelFile("model file is not valid JSON");

  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw CorruptModelFile("model file missing version");
  }
  if (j["version"].get<int>() != 1) {
    throw VersionMismatch("unsupported model version " + j["version"].dump());
  }

  try {
    LstmParams p;
    const auto& d = j.at("dims");
    p.dims = LstmDims{d.at("input").get<Eigen::Index>(), d.at("hidden").get<Eigen::Index>(),
                      d.at("output").get<Eigen::Index>()};
    p.node_order = j.at("node_order").get<std::vector<std::string>>();
    p.seq_len = j.at("seq_len").get<Tick>();
    p.horizon = j.at("horizon").get<Tick>();

    const auto h = p.dims.hidden;
    p.w_i = matrix_from_json(j.at("w_i"), h, p.dims.input, "w_i");
    p.w_f = matrix_from_json(j.at("w_f"), h, p.dims.input, "w_f");
    p.w_g = matrix_from_json(j.at("w_g"), h, p.dims.input, "w_g");
    p.w_o = matrix_from_json(j.at("w_o"), h, p.dims.input, "w_o");
    p.u_i = matrix_from_json(j.at("u_i"), h, h, "u_i");
    p.u_f = matrix_from_json(j.at("u_f"), h, h, "u_f");
    p.u_g = matrix_from_json(j.at("u_g"), h, h, "u_g");
    p.u_o = matrix_from_json(j.at("u_o"), h, h, "u_o");
    p.b_i = vector_from_json(j.at("b_i"), h, "b_i");
    p.b_f = vector_from_json(j.at("b_f"), h, "b_f");
    p.b_g = vector_from_json(j.at("b_g"), h, "b_g");
    p.b_o = vector_from_json(j.at("b_o"), h, "b_o");
    p.w_y = matrix_from_json(j.at("w_y"), p.dims.output, h, "w_y");
    p.b_y = vector_from_json(j.at("b_y"), p.dims.output, "b_y");
    check_dims(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModelFile(std::string("model file field error: ") + e.what());
  }
}

}  // namespace edgesim
