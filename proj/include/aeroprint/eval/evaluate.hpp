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

#include <cstdint>
#include <vector>

#include "aeroprint/geom/core.hpp"

namespace aeroprint::eval {

using geom::TriangleMesh;
using geom::Vec3;

struct OccupancyGrid {
  Vec3 origin = Vec3::Zero();
  double voxel = 0.01;
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint64_t> bits;

  static OccupancyGrid covering(const Vec3& lo, const Vec3& hi, double voxel);

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  bool in_range(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz;
  }
  void set(int i, int j, int k);
  bool get(int i, int j, int k) const;
  std::size_t count() const;
  bool same_geometry(const OccupancyGrid& o) const;
  Vec3 center(int i, int j, int k) const {
    return origin + Vec3((i + 0.5) * voxel, (j + 0.5) * voxel, (k + 0.5) * voxel);
  }
};

struct DepositionSample {
  Vec3 p = Vec3::Zero();
  bool extrude = false;
};

// Marks, for every extruding sample, the voxels whose centers fall in the
// box line_width x line_width x layer_height under the nozzle (z range
// [p.z - layer_height, p.z]). Throws OutOfBounds when an extruding sample
// itself lies outside the grid.
void rasterize_deposition(const std::vector<DepositionSample>& samples,
                          double line_width, double layer_height,
                          OccupancyGrid& grid);

struct GridComparison {
  double iou = 0;       // |R ^ M| / |R u M|
  double coverage = 0;  // |R ^ M| / |R|
  double excess = 0;    // |M \ R| / |R|
};
GridComparison compare_grids(const OccupancyGrid& reference,
                             const OccupancyGrid& measured);

// Voxel-center-in-mesh occupancy of a closed mesh.
void voxelize_mesh(const TriangleMesh& mesh, OccupancyGrid& grid);

// One voxel dilation (26-neighborhood).
OccupancyGrid dilate(const OccupancyGrid& grid);

// Tracking-error bookkeeping, decoupled from the simulator's trace type.
struct TrackSample {
  Vec3 p_ref = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  double phi = 0, theta = 0;
  bool extrude = false;
  int chunk = -1;
};

struct ChunkTrackingStats {
  int chunk = -1;
  double uav_mean_3d = 0, uav_max_3d = 0;
  double uav_mean_planar = 0, uav_max_planar = 0;
  double tip_mean_3d = 0, tip_max_3d = 0;
  double tip_mean_planar = 0, tip_max_planar = 0;
  int samples = 0;
};

// Extruder tip: p + Ry(theta) Rx(phi) (0,0,-l_ex); reference tip is the
// reference shifted straight down by l_ex.
Vec3 extruder_tip(const Vec3& p, double phi, double theta, double extruder_offset);

// Per-chunk statistics over extruding samples.
std::vector<ChunkTrackingStats> tracking_stats(const std::vector<TrackSample>& trace,
                                               double extruder_offset);

}  // namespace aeroprint::eval
