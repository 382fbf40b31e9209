// Copyright 2025 The Aeroprint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeroprint/sim/nmhe.hpp"

namespace aeroprint::sim {

void NmheConfig::validate() const {
  if (window < 2) throw Error("nmhe: window must be >= 2");
  if (!(dt > 0)) throw Error("nmhe: dt must be positive");
  if (((w_max - w_min).array() <= 0).any()) throw Error("nmhe: empty disturbance box");
}

namespace {

std::vector<StateVec> rollout(const DisturbVec& w,
                              const std::vector<StateVec>& measurements,
                              const std::vector<InputVec>& inputs,
                              const NmheConfig& cfg) {
  std::vector<StateVec> xs(measurements.size());
  xs[0] = measurements[0];  // state fully measurable: anchor at the oldest
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    xs[i + 1] = step_euler(cfg.model, xs[i], inputs[i], w, cfg.dt);
  return xs;
}

void check_sizes(const std::vector<StateVec>& measurements,
                 const std::vector<InputVec>& inputs, const NmheConfig& cfg) {
  if (static_cast<int>(measurements.size()) != cfg.window + 1 ||
      static_cast<int>(inputs.size()) != cfg.window)
    throw Error("nmhe: window not fully populated");
}

}  // namespace

double nmhe_objective(const DisturbVec& w, const std::vector<StateVec>& measurements,
                      const std::vector<InputVec>& inputs, const DisturbVec& w_prev,
                      const NmheConfig& cfg) {
  check_sizes(measurements, inputs, cfg);
  const auto xs = rollout(w, measurements, inputs, cfg);
  double j = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const StateVec r = xs[i] - measurements[i];
    j += r.dot(cfg.q_e.cwiseProduct(r));
    const DisturbVec dw = w - w_prev;
    j += dw.dot(cfg.q_ch.cwiseProduct(dw));
    j += w.dot(cfg.r_e.cwiseProduct(w));
  }
  return j;
}

DisturbVec nmhe_gradient(const DisturbVec& w, const std::vector<StateVec>& measurements,
                         const std::vector<InputVec>& inputs, const DisturbVec& w_prev,
                         const NmheConfig& cfg) {
  check_sizes(measurements, inputs, cfg);
  const auto xs = rollout(w, measurements, inputs, cfg);
  const int n_e = cfg.window;

  // mu_i = dJ/dx_i accumulated backward; w enters every Euler step as dt*I.
  DisturbVec grad = DisturbVec::Zero();
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 3> b;
  StateVec mu = 2.0 * cfg.q_e.cwiseProduct(xs[n_e] - measurements[n_e]);
  for (int i = n_e - 1; i >= 0; --i) {
    grad += cfg.dt * mu;
    dynamics_jacobians(cfg.model, xs[i], inputs[i], a, b);
    const Eigen::Matrix<double, 8, 8> fx =
        Eigen::Matrix<double, 8, 8>::Identity() + cfg.dt * a;
    mu = fx.transpose() * mu;
    mu += 2.0 * cfg.q_e.cwiseProduct(xs[i] - measurements[i]);
  }
  const double copies = static_cast<double>(n_e + 1);
  grad += copies * 2.0 * cfg.q_ch.cwiseProduct(w - w_prev);
  grad += copies * 2.0 * cfg.r_e.cwiseProduct(w);
  return grad;
}

// The rollout is nearly linear in the static disturbance, so a projected
// Gauss-Newton iteration settles in a handful of 8x8 solves where a plain
// first-order loop crawls against the Q_e / R_e conditioning gap.
NmheResult nmhe_solve(const std::vector<StateVec>& measurements,
                      const std::vector<InputVec>& inputs, const DisturbVec& w_prev,
                      const NmheConfig& cfg) {
  cfg.validate();
  check_sizes(measurements, inputs, cfg);

  const auto clip = [&](const DisturbVec& v) {
    return DisturbVec(v.cwiseMax(cfg.w_min).cwiseMin(cfg.w_max));
  };
  DisturbVec w = clip(w_prev);
  const double copies = static_cast<double>(cfg.window + 1);

  NmheResult result;
  Eigen::Matrix<double, 8, 8> fx, sens, hess;
  Eigen::Matrix<double, 8, 3> bu;
  for (int iter = 0; iter < 25; ++iter) {
    result.status.iterations = iter;
    const auto xs = rollout(w, measurements, inputs, cfg);
    DisturbVec grad = copies * 2.0 * cfg.q_ch.cwiseProduct(w - w_prev) +
                      copies * 2.0 * cfg.r_e.cwiseProduct(w);
    hess = (copies * 2.0 * (cfg.q_ch + cfg.r_e)).asDiagonal();
    sens.setZero();  // dx_0/dw: anchored
    for (int i = 0; i < cfg.window; ++i) {
      dynamics_jacobians(cfg.model, xs[i], inputs[i], fx, bu);
      const Eigen::Matrix<double, 8, 8> step =
          Eigen::Matrix<double, 8, 8>::Identity() + cfg.dt * fx;
      sens = step * sens;
      sens += cfg.dt * Eigen::Matrix<double, 8, 8>::Identity();
      const StateVec r = xs[i + 1] - measurements[i + 1];
      grad += 2.0 * sens.transpose() * cfg.q_e.cwiseProduct(r);
      hess += 2.0 * sens.transpose() * cfg.q_e.asDiagonal() * sens;
    }
    const DisturbVec delta = hess.ldlt().solve(-grad);
    const DisturbVec w_new = clip(w + delta);
    const double moved = (w_new - w).lpNorm<Eigen::Infinity>();
    w = w_new;
    if (moved < 1e-12) {
      result.status.converged = true;
      break;
    }
  }
  result.w = w;
  result.status.cost = nmhe_objective(w, measurements, inputs, w_prev, cfg);
  {
    const DisturbVec g = nmhe_gradient(w, measurements, inputs, w_prev, cfg);
    const DisturbVec probe = clip(w - 1e-3 * g);
    result.status.stationarity = (w - probe).lpNorm<Eigen::Infinity>() / 1e-3;
  }
  return result;
}

}  // namespace aeroprint::sim
