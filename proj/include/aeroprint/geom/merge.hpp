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

#include "aeroprint/geom/core.hpp"

namespace aeroprint::geom {

// Union of closed meshes whose interiors are disjoint and whose contacts
// all lie on shared planes (the cells produced by plane splits). Coincident
// face regions of opposite orientation cancel; partially covered faces are
// re-triangulated. This is not a general boolean engine.
TriangleMesh merge_cells(const std::vector<TriangleMesh>& cells);

// Splits triangle edges at vertices of other triangles that lie on them, so
// seams introduced by merge_cells become edge-to-edge watertight.
TriangleMesh repair_tjunctions(const TriangleMesh& mesh);

}  // namespace aeroprint::geom
