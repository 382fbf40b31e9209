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

#include "aeroprint/sim/nmpc.hpp"

#include <algorithm>
#include <cmath>

namespace aeroprint::sim {

void NmpcConfig::validate() const {
  if (horizon < 1) throw Error("nmpc: horizon must be >= 1");
  if (!(dt > 0)) throw Error("nmpc: dt must be positive");
  if ((q_x.array() < 0).any() || (q_u.array() < 0).any() || (q_du.array() < 0).any())
    throw Error("nmpc: weights must be non-negative");
  if (((u_max - u_min).array() < 0).any()) throw Error("nmpc: empty input box");
  if (!(dphi_max > 0) || !(dtheta_max > 0)) throw Error("nmpc: rate bounds must be positive");
}

NmpcController::NmpcController(const NmpcConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void NmpcController::reset_warm_start() { have_warm_ = false; }

namespace {

DisturbVec disturbance_from(const DisturbVec& w) { return w; }

}  // namespace

double NmpcController::objective(const Eigen::VectorXd& u_seq, const StateVec& x0,
                                 const std::vector<StateVec>& refs,
                                 const InputVec& u_prev, const DisturbVec& w_hat) const {
  const int n = cfg_.horizon;
  double j = 0;
  StateVec x = x0;
  InputVec last = u_prev;
  for (int k = 0; k < n; ++k) {
    const InputVec u = u_seq.segment<3>(3 * k);
    x = step_euler(cfg_.model, x, u, w_hat, cfg_.dt);
    const StateVec e = x - refs[k];
    j += e.dot(cfg_.q_x.cwiseProduct(e));
    const InputVec eu = u - cfg_.u_nom;
    j += eu.dot(cfg_.q_u.cwiseProduct(eu));
    const InputVec du = u - last;
    j += du.dot(cfg_.q_du.cwiseProduct(du));
    last = u;
  }
  return j;
}

Eigen::VectorXd NmpcController::objective_gradient(const Eigen::VectorXd& u_seq,
                                                   const StateVec& x0,
                                                   const std::vector<StateVec>& refs,
                                                   const InputVec& u_prev,
                                                   const DisturbVec& w_hat) const {
  const int n = cfg_.horizon;
  std::vector<StateVec> xs(n + 1);
  xs[0] = x0;
  for (int k = 0; k < n; ++k)
    xs[k + 1] = step_euler(cfg_.model, xs[k], u_seq.segment<3>(3 * k), w_hat, cfg_.dt);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * n);
  // Input-only terms.
  for (int k = 0; k < n; ++k) {
    const InputVec u = u_seq.segment<3>(3 * k);
    const InputVec prev = k == 0 ? u_prev : InputVec(u_seq.segment<3>(3 * (k - 1)));
    grad.segment<3>(3 * k) += 2.0 * cfg_.q_u.cwiseProduct(u - cfg_.u_nom);
    grad.segment<3>(3 * k) += 2.0 * cfg_.q_du.cwiseProduct(u - prev);
    if (k + 1 < n) {
      const InputVec next = u_seq.segment<3>(3 * (k + 1));
      grad.segment<3>(3 * k) -= 2.0 * cfg_.q_du.cwiseProduct(next - u);
    }
  }
  // Reverse sweep for the state terms.
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 3> b;
  StateVec lambda = StateVec::Zero();
  for (int k = n - 1; k >= 0; --k) {
    const StateVec e = xs[k + 1] - refs[k];
    lambda += 2.0 * cfg_.q_x.cwiseProduct(e);
    dynamics_jacobians(cfg_.model, xs[k], u_seq.segment<3>(3 * k), a, b);
    const Eigen::Matrix<double, 8, 8> fx =
        Eigen::Matrix<double, 8, 8>::Identity() + cfg_.dt * a;
    const Eigen::Matrix<double, 8, 3> fu = cfg_.dt * b;
    grad.segment<3>(3 * k) += fu.transpose() * lambda;
    lambda = fx.transpose() * lambda;
  }
  return grad;
}

void NmpcController::project(Eigen::VectorXd& u_seq, const InputVec& u_prev) const {
  const int n = cfg_.horizon;
  double prev_phi = u_prev(1);
  double prev_theta = u_prev(2);
  for (int k = 0; k < n; ++k) {
    auto u = u_seq.segment<3>(3 * k);
    u = u.cwiseMax(cfg_.u_min).cwiseMin(cfg_.u_max);
    u(1) = std::clamp(u(1), prev_phi - cfg_.dphi_max, prev_phi + cfg_.dphi_max);
    u(2) = std::clamp(u(2), prev_theta - cfg_.dtheta_max, prev_theta + cfg_.dtheta_max);
    prev_phi = u(1);
    prev_theta = u(2);
  }
}

NmpcResult NmpcController::solve(const StateVec& x0, const std::vector<StateVec>& refs,
                                 const InputVec& u_prev, const DisturbVec& w_hat) {
  if (static_cast<int>(refs.size()) != cfg_.horizon)
    throw Error("nmpc: refs must match the horizon");
  if (!x0.allFinite()) throw Error("nmpc: non-finite state");

  const int n = cfg_.horizon;
  Eigen::VectorXd u_seq(3 * n);
  if (have_warm_) {
    // Shift by one step, repeating the tail.
    u_seq.head(3 * (n - 1)) = warm_.tail(3 * (n - 1));
    u_seq.tail<3>() = warm_.tail<3>();
  } else {
    for (int k = 0; k < n; ++k) u_seq.segment<3>(3 * k) = cfg_.u_nom;
  }

  const auto value = [&](const Eigen::VectorXd& u) {
    return objective(u, x0, refs, u_prev, w_hat);
  };
  const auto gradient = [&](const Eigen::VectorXd& u) {
    return objective_gradient(u, x0, refs, u_prev, w_hat);
  };
  const auto proj = [&](Eigen::VectorXd& u) { project(u, u_prev); };

  NmpcResult result;
  result.status = projected_gradient(u_seq, value, gradient, proj,
                                     cfg_.max_iterations, cfg_.tolerance);
  warm_ = u_seq;
  have_warm_ = true;
  result.u = u_seq.head<3>();
  return result;
}

}  // namespace aeroprint::sim
