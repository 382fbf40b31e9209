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

#pragma once

#include <vector>

#include "aeroprint/sim/model.hpp"
#include "aeroprint/sim/solver.hpp"

namespace aeroprint::sim {

struct NmpcConfig {
  VehicleModel model;
  double dt = 0.05;
  int horizon = 40;
  StateVec q_x = (StateVec() << 100, 100, 50, 4, 4, 4, 30, 30).finished();
  InputVec q_u{3, 250, 250};
  InputVec q_du{3, 100, 100};
  InputVec u_min{3.0, -0.3, -0.3};
  InputVec u_max{15.5, 0.3, 0.3};
  double dphi_max = 0.04;    // per-step reference rate bounds [rad]
  double dtheta_max = 0.04;
  InputVec u_nom{9.81, 0, 0};
  int max_iterations = 200;
  double tolerance = 1e-4;
  void validate() const;
};

struct NmpcResult {
  InputVec u = InputVec::Zero();
  SolveStatus status;
};

// Single-shooting tracker: decision variables are the stacked inputs, the
// prediction model is Euler with the estimated disturbance added, gradients
// come from a reverse sweep. Box bounds plus per-step attitude-reference
// rate bounds, anchored at the previously applied input.
class NmpcController {
 public:
  explicit NmpcController(const NmpcConfig& cfg);

  // refs[j] is the target state for step j+1; refs.size() == horizon.
  NmpcResult solve(const StateVec& x0, const std::vector<StateVec>& refs,
                   const InputVec& u_prev, const DisturbVec& w_hat);

  void reset_warm_start();

  // Objective machinery, exposed for the finite-difference checks.
  double objective(const Eigen::VectorXd& u_seq, const StateVec& x0,
                   const std::vector<StateVec>& refs, const InputVec& u_prev,
                   const DisturbVec& w_hat) const;
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& u_seq, const StateVec& x0,
                                     const std::vector<StateVec>& refs,
                                     const InputVec& u_prev,
                                     const DisturbVec& w_hat) const;
  void project(Eigen::VectorXd& u_seq, const InputVec& u_prev) const;

  const NmpcConfig& config() const { return cfg_; }

 private:
  NmpcConfig cfg_;
  Eigen::VectorXd warm_;
  bool have_warm_ = false;
};

}  // namespace aeroprint::sim
