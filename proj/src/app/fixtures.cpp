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

#include "aeroprint/app/fixtures.hpp"

#include <cmath>

namespace aeroprint::app {

using geom::Vec2;

geom::TriangleMesh rectangle_fixture() {
  const double half = 0.55 / 2;
  const double hole = 0.20 / 2;
  std::vector<std::vector<Vec2>> loops;
  loops.push_back({{-half, -half}, {half, -half}, {half, half}, {-half, half}});
  loops.push_back({{-hole, -hole}, {-hole, hole}, {hole, hole}, {hole, -hole}});
  return geom::extrude_polygon(loops, 0.08);
}

geom::TriangleMesh hexagon_fixture() {
  const double side_mid = 0.3155;
  const double wall = 0.10;
  const double height = 0.10;
  const double r_mid = side_mid;  // circumradius equals side for a hexagon
  const double apothem_mid = side_mid * std::sqrt(3.0) / 2.0;
  const double r_out = r_mid * (apothem_mid + wall / 2) / apothem_mid;
  const double r_in = r_mid * (apothem_mid - wall / 2) / apothem_mid;

  std::vector<Vec2> outer, inner;
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI / 3.0 * k;
    outer.emplace_back(r_out * std::cos(a), r_out * std::sin(a));
    inner.emplace_back(r_in * std::cos(a), r_in * std::sin(a));
  }
  std::reverse(inner.begin(), inner.end());
  return geom::extrude_polygon({outer, inner}, height);
}

geom::TriangleMesh fixture_by_name(const std::string& name) {
  if (name == "rect") return rectangle_fixture();
  if (name == "hex") return hexagon_fixture();
  throw IoError("unknown fixture: " + name + " (expected rect|hex)");
}

}  // namespace aeroprint::app
