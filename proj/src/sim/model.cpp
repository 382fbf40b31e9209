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

#include "aeroprint/sim/model.hpp"

#include <cmath>

namespace aeroprint::sim {

StateVec dynamics(const VehicleModel& m, const StateVec& x, const InputVec& u,
                  const DisturbVec& w) {
  const double phi = x(6), theta = x(7);
  const double thrust = u(0);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);

  StateVec dx;
  dx.head<3>() = x.segment<3>(3) + w.head<3>();
  dx(3) = thrust * cp * st;
  dx(4) = -thrust * sp;
  dx(5) = thrust * cp * ct - m.gravity;
  dx.segment<3>(3) -= m.drag.cwiseProduct(x.segment<3>(3));
  dx.segment<3>(3) += w.segment<3>(3);
  dx(6) = (m.k_phi * u(1) - phi) / m.tau_phi + w(6);
  dx(7) = (m.k_theta * u(2) - theta) / m.tau_theta + w(7);
  return dx;
}

void dynamics_jacobians(const VehicleModel& m, const StateVec& x, const InputVec& u,
                        Eigen::Matrix<double, 8, 8>& a, Eigen::Matrix<double, 8, 3>& b) {
  const double phi = x(6), theta = x(7);
  const double thrust = u(0);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);

  a.setZero();
  a.block<3, 3>(0, 3).setIdentity();
  a.block<3, 3>(3, 3) = (-m.drag).asDiagonal();
  a(3, 6) = -thrust * sp * st;
  a(4, 6) = -thrust * cp;
  a(5, 6) = -thrust * sp * ct;
  a(3, 7) = thrust * cp * ct;
  a(5, 7) = -thrust * cp * st;
  a(6, 6) = -1.0 / m.tau_phi;
  a(7, 7) = -1.0 / m.tau_theta;

  b.setZero();
  b(3, 0) = cp * st;
  b(4, 0) = -sp;
  b(5, 0) = cp * ct;
  b(6, 1) = m.k_phi / m.tau_phi;
  b(7, 2) = m.k_theta / m.tau_theta;
}

}  // namespace aeroprint::sim
