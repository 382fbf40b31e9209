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

struct NmheConfig {
  VehicleModel model;
  double dt = 0.05;
  int window = 40;  // N_e
  DisturbVec q_e = DisturbVec::Constant(1e5);
  DisturbVec q_ch = DisturbVec::Constant(10);
  DisturbVec r_e = (DisturbVec() << 500, 500, 500, 1, 1, 1, 200, 200).finished();
  DisturbVec w_min =
      (DisturbVec() << -0.05, -0.05, -0.05, -0.6, -0.6, -0.6, -0.05, -0.05).finished();
  DisturbVec w_max =
      (DisturbVec() << 0.05, 0.05, 0.05, 0.6, 0.6, 0.6, 0.05, 0.05).finished();
  int max_iterations = 200;
  double tolerance = 1e-4;
  void validate() const;
};

struct NmheResult {
  DisturbVec w = DisturbVec::Zero();
  SolveStatus status;
};

// Static-disturbance moving-horizon fit: the window anchors at the oldest
// measurement and rolls the model forward with a single w, minimizing the
// measurement residual plus rate and magnitude regularizers, subject to the
// disturbance box.
NmheResult nmhe_solve(const std::vector<StateVec>& measurements,  // size N_e+1
                      const std::vector<InputVec>& inputs,        // size N_e
                      const DisturbVec& w_prev, const NmheConfig& cfg);

// Objective machinery, exposed for the finite-difference checks.
double nmhe_objective(const DisturbVec& w, const std::vector<StateVec>& measurements,
                      const std::vector<InputVec>& inputs, const DisturbVec& w_prev,
                      const NmheConfig& cfg);
DisturbVec nmhe_gradient(const DisturbVec& w, const std::vector<StateVec>& measurements,
                         const std::vector<InputVec>& inputs, const DisturbVec& w_prev,
                         const NmheConfig& cfg);

}  // namespace aeroprint::sim
