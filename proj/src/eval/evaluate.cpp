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

#include "aeroprint/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aeroprint/geom/polygon.hpp"
#include "aeroprint/geom/split.hpp"

namespace aeroprint::eval {

OccupancyGrid OccupancyGrid::covering(const Vec3& lo, const Vec3& hi, double voxel) {
  if (!(voxel > 0)) throw Error("occupancy grid: voxel size must be positive");
  OccupancyGrid g;
  g.origin = lo;
  g.voxel = voxel;
  g.nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / voxel - 1e-9)));
  g.ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / voxel - 1e-9)));
  g.nz = std::max(1, static_cast<int>(std::ceil((hi.z() - lo.z()) / voxel - 1e-9)));
  g.bits.assign((static_cast<std::size_t>(g.nx) * g.ny * g.nz + 63) / 64, 0);
  return g;
}

void OccupancyGrid::set(int i, int j, int k) {
  const std::size_t idx = index(i, j, k);
  bits[idx >> 6] |= (1ull << (idx & 63));
}

bool OccupancyGrid::get(int i, int j, int k) const {
  const std::size_t idx = index(i, j, k);
  return (bits[idx >> 6] >> (idx & 63)) & 1ull;
}

std::size_t OccupancyGrid::count() const {
  std::size_t c = 0;
  for (auto w : bits) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool OccupancyGrid::same_geometry(const OccupancyGrid& o) const {
  return nx == o.nx && ny == o.ny && nz == o.nz && voxel == o.voxel &&
         (origin - o.origin).lpNorm<Eigen::Infinity>() < 1e-9;
}

void rasterize_deposition(const std::vector<DepositionSample>& samples,
                          double line_width, double layer_height,
                          OccupancyGrid& grid) {
  const double half = line_width / 2;
  for (const auto& s : samples) {
    if (!s.extrude) continue;
    const Vec3 rel = s.p - grid.origin;
    if (rel.x() < 0 || rel.y() < 0 || rel.z() < 0 ||
        rel.x() > grid.nx * grid.voxel || rel.y() > grid.ny * grid.voxel ||
        rel.z() > grid.nz * grid.voxel)
      throw OutOfBounds("rasterize_deposition: sample outside grid");
    // Voxel centers within the padded box.
    const auto lo_idx = [&](double x) {
      return static_cast<int>(std::ceil(x / grid.voxel - 0.5 - 1e-9));
    };
    const auto hi_idx = [&](double x) {
      return static_cast<int>(std::floor(x / grid.voxel - 0.5 + 1e-9));
    };
    const int i0 = std::max(0, lo_idx(rel.x() - half));
    const int i1 = std::min(grid.nx - 1, hi_idx(rel.x() + half));
    const int j0 = std::max(0, lo_idx(rel.y() - half));
    const int j1 = std::min(grid.ny - 1, hi_idx(rel.y() + half));
    const int k0 = std::max(0, lo_idx(rel.z() - layer_height));
    const int k1 = std::min(grid.nz - 1, hi_idx(rel.z()));
    for (int k = k0; k <= k1; ++k)
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) grid.set(i, j, k);
  }
}

GridComparison compare_grids(const OccupancyGrid& reference,
                             const OccupancyGrid& measured) {
  if (!reference.same_geometry(measured))
    throw GridMismatch("compare_grids: incompatible grid geometry");
  std::size_t inter = 0, uni = 0, excess = 0, ref = 0;
  for (std::size_t w = 0; w < reference.bits.size(); ++w) {
    const std::uint64_t r = reference.bits[w];
    const std::uint64_t m = measured.bits[w];
    inter += static_cast<std::size_t>(__builtin_popcountll(r & m));
    uni += static_cast<std::size_t>(__builtin_popcountll(r | m));
    excess += static_cast<std::size_t>(__builtin_popcountll(m & ~r));
    ref += static_cast<std::size_t>(__builtin_popcountll(r));
  }
  GridComparison c;
  c.iou = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
  c.coverage = ref ? static_cast<double>(inter) / static_cast<double>(ref) : 1.0;
  c.excess = ref ? static_cast<double>(excess) / static_cast<double>(ref) : 0.0;
  return c;
}

void voxelize_mesh(const TriangleMesh& mesh, OccupancyGrid& grid) {
  for (int k = 0; k < grid.nz; ++k) {
    const double z = grid.origin.z() + (k + 0.5) * grid.voxel;
    const auto loops = geom::cross_section_z(mesh, z);
    if (loops.empty()) continue;
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const Vec3 c = grid.center(i, j, k);
        if (geom::point_in_loops(geom::Vec2(c.x(), c.y()), loops)) grid.set(i, j, k);
      }
    }
  }
}

OccupancyGrid dilate(const OccupancyGrid& grid) {
  OccupancyGrid out = grid;
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.get(i, j, k)) continue;
        for (int dk = -1; dk <= 1; ++dk)
          for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di)
              if (grid.in_range(i + di, j + dj, k + dk))
                out.set(i + di, j + dj, k + dk);
      }
  return out;
}

Vec3 extruder_tip(const Vec3& p, double phi, double theta, double extruder_offset) {
  const Eigen::Matrix3d r =
      (Eigen::AngleAxisd(theta, Vec3::UnitY()) * Eigen::AngleAxisd(phi, Vec3::UnitX()))
          .toRotationMatrix();
  return p + r * Vec3(0, 0, -extruder_offset);
}

std::vector<ChunkTrackingStats> tracking_stats(const std::vector<TrackSample>& trace,
                                               double extruder_offset) {
  if (trace.empty()) throw EmptyTrace("tracking_stats: empty trace");
  std::map<int, ChunkTrackingStats> acc;
  for (const auto& s : trace) {
    if (!s.extrude || s.chunk < 0) continue;
    auto& st = acc[s.chunk];
    st.chunk = s.chunk;
    const Vec3 e_uav = s.p_ref - s.p;
    const Vec3 tip = extruder_tip(s.p, s.phi, s.theta, extruder_offset);
    const Vec3 tip_ref = s.p_ref - Vec3(0, 0, extruder_offset);
    const Vec3 e_tip = tip_ref - tip;
    const double u3 = e_uav.norm(), up = e_uav.head<2>().norm();
    const double t3 = e_tip.norm(), tp = e_tip.head<2>().norm();
    st.uav_mean_3d += u3;
    st.uav_mean_planar += up;
    st.tip_mean_3d += t3;
    st.tip_mean_planar += tp;
    st.uav_max_3d = std::max(st.uav_max_3d, u3);
    st.uav_max_planar = std::max(st.uav_max_planar, up);
    st.tip_max_3d = std::max(st.tip_max_3d, t3);
    st.tip_max_planar = std::max(st.tip_max_planar, tp);
    ++st.samples;
  }
  std::vector<ChunkTrackingStats> out;
  for (auto& [id, st] : acc) {
    if (st.samples > 0) {
      st.uav_mean_3d /= st.samples;
      st.uav_mean_planar /= st.samples;
      st.tip_mean_3d /= st.samples;
      st.tip_mean_planar /= st.samples;
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace aeroprint::eval
