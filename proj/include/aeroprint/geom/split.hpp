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

#include <utility>

#include "aeroprint/geom/core.hpp"
#include "aeroprint/geom/polygon.hpp"

namespace aeroprint::geom {

struct SplitResult {
  TriangleMesh negative;  // opposite the plane normal
  TriangleMesh positive;  // along the plane normal
};

// Splits a closed mesh by a plane. Both outputs are closed: the cut
// cross-section is capped by triangulating its loops (holes supported).
// Cap faces carry the generating plane and side in their FaceTag. A plane
// that misses the mesh returns the whole mesh on one side and an empty
// mesh on the other. Throws NonManifoldInput for open input and
// DegenerateCut when an output is a sliver below tolerance (the caller
// decides whether that means "treat as not intersecting").
SplitResult split_mesh(const TriangleMesh& mesh, const CutPlane& plane);

// Cross-section of a closed mesh with the horizontal plane z = height:
// closed loops in the (x, y) frame, outers CCW and holes CW.
std::vector<Polygon2D> cross_section_z(const TriangleMesh& mesh, double height);

// Cross-section loops with an arbitrary plane, expressed in the plane's
// (u, v) basis from plane_basis(normal).
std::vector<Polygon2D> cross_section(const TriangleMesh& mesh,
                                     const CutPlane& plane);

}  // namespace aeroprint::geom
