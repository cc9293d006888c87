#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/dataset.hpp"
#include "edgesim/events.hpp"
#include "edgesim/rng.hpp"
#include "edgesim/store.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

struct LstmDims {
  Eigen::Index input = 0;   // N + 2 when fed by encode_window
  Eigen::Index hidden = 0;
  Eigen::Index output = 0;  // N

  friend bool operator==(const LstmDims&, const LstmDims&) = default;
};

// Single-layer LSTM with a sigmoid readout per node. Weight naming follows
// the usual gate convention: i (input), f (forget), g (cell candidate),
// o (output).
struct LstmParams {
  LstmDims dims;
  std::vector<std::string> node_order;
  Tick seq_len = 0;
  Tick horizon = 0;

  Eigen::MatrixXd w_i, w_f, w_g, w_o;  // hidden x input
  Eigen::MatrixXd u_i, u_f, u_g, u_o;  // hidden x hidden
  Eigen::VectorXd b_i, b_f, b_g, b_o;  // hidden
  Eigen::MatrixXd w_y;                 // output x hidden
  Eigen::VectorXd b_y;                 // output

  // Zero-initialized parameters of consistent shape.
  static LstmParams zeros(LstmDims dims);

  // Uniform [-0.1, 0.1] init from the stream (row-major draw order, weights
  // in declaration order), then +1.0 on the forget-gate bias.
  static LstmParams init(LstmDims dims, std::vector<std::string> node_order, Tick seq_len,
                         Tick horizon, RngStream& rng);
};

// Gradient buffer shaped like the trainable parameters.
struct LstmGrads {
  Eigen::MatrixXd w_i, w_f, w_g, w_o;
  Eigen::MatrixXd u_i, u_f, u_g, u_o;
  Eigen::VectorXd b_i, b_f, b_g, b_o;
  Eigen::MatrixXd w_y;
  Eigen::VectorXd b_y;

  static LstmGrads zeros(const LstmDims& dims);
};

// Per-step activations for a batch, kept for backpropagation through time.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> x, gi, gf, gg, go, c, h, tanh_c;  // one entry per step
  Eigen::MatrixXd probs;                                         // output x batch
};

// Runs the gated recurrence from h = c = 0 over one sequence (input x len)
// and returns per-node probabilities sigma(W_y h_last + b_y).
Eigen::VectorXd lstm_forward(const LstmParams& params, const Eigen::MatrixXd& sequence,
                             ForwardCache* cache = nullptr);

// Mean binary cross-entropy over (samples x nodes), probabilities clamped to
// [1e-7, 1 - 1e-7]; gradients via full-sequence BPTT.
double loss_and_grad(const LstmParams& params, const std::vector<TrainingSample>& batch,
                     LstmGrads& grads);

struct TrainHyper {
  Eigen::Index hidden = 32;
  Tick seq_len = 24;
  Tick horizon = 15;
  double lr = 0.05;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 1;
};

struct TrainResult {
  LstmParams params;
  std::vector<double> loss_history;  // one mean-loss entry per epoch
};

// Plain SGD over seeded shuffled batches; fully deterministic given
// (dataset, hyper).
TrainResult train(const std::vector<TrainingSample>& dataset, const TrainHyper& hyper,
                  std::vector<std::string> node_order);

// Encodes the window (each column with its own tick's sin/cos), runs the
// forward pass, and thresholds at 0.5 (ties classify ON).
PredictionResponse predict(const LstmParams& params, const StatusMatrix& recent_window,
                           Tick issued_at, Tick horizon);

// JSON model file (version 1). load(save(p)) reproduces bit-identical
// predictions.
void save_model(const LstmParams& params, const std::string& path);
LstmParams load_model(const std::string& path);

}  // namespace edgesim
