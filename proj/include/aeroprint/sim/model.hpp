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

#include <Eigen/Dense>

#include "aeroprint/error.hpp"

namespace aeroprint::sim {

// State x = [p_x, p_y, p_z, v_x, v_y, v_z, phi, theta].
using StateVec = Eigen::Matrix<double, 8, 1>;
// Input u = [T, phi_ref, theta_ref]; T is thrust-normalized acceleration.
using InputVec = Eigen::Vector3d;
// Disturbance w = [w_p, w_v, w_phi, w_theta].
using DisturbVec = Eigen::Matrix<double, 8, 1>;

struct VehicleModel {
  Eigen::Vector3d drag{0.1, 0.1, 0.2};  // A [1/s]
  double tau_phi = 0.2;
  double tau_theta = 0.2;
  double k_phi = 1.0;
  double k_theta = 1.0;
  double gravity = 9.81;
};

// Continuous dynamics: p' = v + w_p; v' = R_y(theta) R_x(phi) [0,0,T] - g e_z
// - A v + w_v; first-order attitude response toward the references.
StateVec dynamics(const VehicleModel& m, const StateVec& x, const InputVec& u,
                  const DisturbVec& w);

// d(dynamics)/dx and d(dynamics)/du at (x, u); w enters additively.
void dynamics_jacobians(const VehicleModel& m, const StateVec& x, const InputVec& u,
                        Eigen::Matrix<double, 8, 8>& a, Eigen::Matrix<double, 8, 3>& b);

inline StateVec step_euler(const VehicleModel& m, const StateVec& x, const InputVec& u,
                           const DisturbVec& w, double dt) {
  return x + dt * dynamics(m, x, u, w);
}

inline StateVec hover_state(const Eigen::Vector3d& p) {
  StateVec x = StateVec::Zero();
  x.head<3>() = p;
  return x;
}

}  // namespace aeroprint::sim
