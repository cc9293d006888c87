#pragma once

// Test-side oracles for the LSTM: central finite differences over every
// parameter entry, plus random tiny-net builders. Kept out of the library on
// purpose so the check stays independent of the backprop implementation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "edgesim/dataset.hpp"
#include "edgesim/lstm.hpp"
#include "edgesim/rng.hpp"

namespace edgesim::testutil {

inline std::vector<double*> param_entries(LstmParams& p) {
  std::vector<double*> out;
  auto add_matrix = [&out](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
  };
  auto add_vector = [&out](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data() + i);
  };
  add_matrix(p.w_i);
  add_matrix(p.w_f);
  add_matrix(p.w_g);
  add_matrix(p.w_o);
  add_matrix(p.u_i);
  add_matrix(p.u_f);
  add_matrix(p.u_g);
  add_matrix(p.u_o);
  add_vector(p.b_i);
  add_vector(p.b_f);
  add_vector(p.b_g);
  add_vector(p.b_o);
  add_matrix(p.w_y);
  add_vector(p.b_y);
  return out;
}

inline std::vector<const double*> grad_entries(const LstmGrads& g) {
  std::vector<const double*> out;
  auto add_matrix = [&out](const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
  };
  auto add_vector = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data() + i);
  };
  add_matrix(g.w_i);
  add_matrix(g.w_f);
  add_matrix(g.w_g);
  add_matrix(g.w_o);
  add_matrix(g.u_i);
  add_matrix(g.u_f);
  add_matrix(g.u_g);
  add_matrix(g.u_o);
  add_vector(g.b_i);
  add_vector(g.b_f);
  add_vector(g.b_g);
  add_vector(g.b_o);
  add_matrix(g.w_y);
  add_vector(g.b_y);
  return out;
}

// Random parameters in [-0.5, 0.5]; more representative than the training
// init range for exercising the gates.
inline LstmParams random_params(LstmDims dims, RngStream& rng) {
  LstmParams p = LstmParams::zeros(dims);
  for (double* v : param_entries(p)) *v = rng.uniform_real(-0.5, 0.5);
  p.seq_len = 0;
  p.horizon = 1;
  return p;
}

inline std::vector<TrainingSample> random_batch(LstmDims dims, Tick seq_len, int batch,
                                                RngStream& rng) {
  std::vector<TrainingSample> out;
  for (int b = 0; b < batch; ++b) {
    TrainingSample s;
    s.inputs = Eigen::MatrixXd(dims.input, seq_len);
    for (Tick t = 0; t < seq_len; ++t) {
      const TimeEncoding enc = encode_time(rng.uniform_int(0, kTicksPerDay - 1));
      s.inputs(0, t) = enc.sin_t;
      s.inputs(1, t) = enc.cos_t;
      for (Eigen::Index i = 2; i < dims.input; ++i) {
        s.inputs(i, t) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      }
    }
    s.label = Eigen::VectorXd(dims.output);
    for (Eigen::Index i = 0; i < dims.output; ++i) s.label(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

struct GradCheck {
  double max_rel_err = 0.0;
  std::size_t entries = 0;
};

// Central differences with step eps over every parameter entry; relative
// error uses max(|analytic|, |numeric|, 1e-6) as the denominator so
// near-zero components stay meaningful.
inline GradCheck finite_difference_check(LstmParams params,
                                         const std::vector<TrainingSample>& batch,
                                         double eps = 1e-4) {
  LstmGrads analytic = LstmGrads::zeros(params.dims);
  loss_and_grad(params, batch, analytic);
  const auto grads = grad_entries(analytic);
  const auto entries = param_entries(params);

  GradCheck result;
  result.entries = entries.size();
  LstmGrads scratch = LstmGrads::zeros(params.dims);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double saved = *entries[k];
    *entries[k] = saved + eps;
    const double up = loss_and_grad(params, batch, scratch);
    *entries[k] = saved - eps;
    const double down = loss_and_grad(params, batch, scratch);
    *entries[k] = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(*grads[k]), 1e-6});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(numeric - *grads[k]) / denom);
  }
  return result;
}

}  // namespace edgesim::testutil
