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
#include <functional>

namespace aeroprint::sim {

struct SolveStatus {
  bool converged = false;
  int iterations = 0;
  double cost = 0;
  double stationarity = 0;
};

// Projected gradient with Armijo backtracking. `project` must map any point
// into the feasible set; stationarity is the gradient mapping at a fixed
// probe step. Deterministic.
SolveStatus projected_gradient(
    Eigen::VectorXd& u, const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const std::function<void(Eigen::VectorXd&)>& project, int max_iterations,
    double tolerance);

}  // namespace aeroprint::sim
