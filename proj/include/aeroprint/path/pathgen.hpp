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
#include "aeroprint/geom/polygon.hpp"

namespace aeroprint::path {

using geom::TriangleMesh;
using geom::Vec3;

struct SliceConfig {
  double layer_height = 0.025;      // l_h [m]
  double line_width = 0.03;         // l_w [m]
  double deposition_speed = 0.10;   // V_dep [m/s]
  double extruder_offset = 0.30;    // l_ex [m]
  double sample_period = 0.05;      // delta_t [s]
  double staging_altitude = 0.5;    // approach/retreat clearance [m]
  double sdf_cell = 0.0005;         // offset raster resolution [m]
  void validate() const;
};

enum class PathFrame { Extruder, UavBody };

struct PathSegment {
  int layer = 0;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  bool extrude = false;
};

struct ManufacturingPath {
  PathFrame frame = PathFrame::Extruder;
  std::vector<PathSegment> segments;

  double total_length() const;
  double extrusion_length() const;
};

// Concentric perimeters at 100% infill, bottom-up. Layers live on the
// global grid (multiples of layer_height from z = 0); the bottom and top
// deposition bands clamp to the chunk so material tiles it exactly.
// Throws Unsliceable when a significant cross-section region is thinner
// than one line width.
ManufacturingPath slice_chunk(const TriangleMesh& chunk, const SliceConfig& cfg);

// Vertical translation into the body frame (small-tilt assumption).
ManufacturingPath elevate_path(const ManufacturingPath& path, double extruder_offset);

struct TimedSetpoint {
  double t = 0;
  Vec3 p = Vec3::Zero();
  bool extrude = false;
};

struct ReferenceStream {
  double sample_period = 0.05;
  std::vector<TimedSetpoint> points;
};

// Constant-speed interpolation: setpoints every speed*dt along each
// segment, the last step of a segment clamping to its end vertex. The
// extrude flag is on from the first printing segment's start through the
// last one's end (deposition runs across intra-chunk travels).
ReferenceStream interpolate_references(const ManufacturingPath& path, double speed,
                                       double dt);

// Concentric loops of one planar region (exposed for tests): full rings
// first (level k at depth line_width/2 + k*line_width), then a centerline
// pass over any leftover ridge wider than the tolerance.
struct LayerLoops {
  std::vector<geom::Polygon2D> rings;       // emission order
  std::vector<geom::Polygon2D> centerline;  // appended after rings
};
LayerLoops concentric_loops(const std::vector<geom::Polygon2D>& region,
                            double line_width, double cell);

}  // namespace aeroprint::path
