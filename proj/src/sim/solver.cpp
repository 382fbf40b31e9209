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

#include "aeroprint/sim/solver.hpp"

#include <algorithm>
#include <cmath>

namespace aeroprint::sim {

SolveStatus projected_gradient(
    Eigen::VectorXd& u, const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const std::function<void(Eigen::VectorXd&)>& project, int max_iterations,
    double tolerance) {
  constexpr double kProbe = 1e-3;
  constexpr double kStepMin = 1e-14;
  constexpr double kStepMax = 1.0;

  project(u);
  double cost = value(u);
  Eigen::VectorXd grad = gradient(u);
  double step = 1e-2;

  SolveStatus status;
  for (int it = 0; it < max_iterations; ++it) {
    status.iterations = it;
    // Gradient mapping at a fixed probe step.
    Eigen::VectorXd probe = u - kProbe * grad;
    project(probe);
    status.stationarity = (u - probe).lpNorm<Eigen::Infinity>() / kProbe;
    if (status.stationarity <= tolerance) {
      status.converged = true;
      break;
    }

    bool accepted = false;
    while (step >= kStepMin) {
      Eigen::VectorXd trial = u - step * grad;
      project(trial);
      const Eigen::VectorXd d = trial - u;
      const double d2 = d.squaredNorm();
      if (d2 <= 0) break;  // pinned at the feasible set boundary
      const double trial_cost = value(trial);
      // Sufficient decrease against the projected step length.
      if (trial_cost <= cost + grad.dot(d) + 0.5 / step * d2) {
        u = std::move(trial);
        cost = trial_cost;
        grad = gradient(u);
        step = std::min(step * 2.0, kStepMax);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no feasible descent within step limits
  }
  status.cost = cost;
  return status;
}

}  // namespace aeroprint::sim
