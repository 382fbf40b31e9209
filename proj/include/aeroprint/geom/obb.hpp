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

#include "aeroprint/geom/core.hpp"

namespace aeroprint::geom {

// Oriented bounding box: center, orthonormal axes and half-length extents.
struct OrientedBoundingBox {
  Vec3 center = Vec3::Zero();
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns u1,u2,u3
  Vec3 extents = Vec3::Zero();                         // half-lengths

  double min_extent() const { return extents.minCoeff(); }
  bool contains(const Vec3& p, double slack = 1e-6) const;
};

// PCA construction over the area-weighted surface; contains every vertex,
// near-minimal but not exactly minimal.
OrientedBoundingBox compute_obb(const TriangleMesh& mesh);

}  // namespace aeroprint::geom
