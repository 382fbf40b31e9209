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
#include <array>
#include <cstdint>
#include <vector>

#include "aeroprint/error.hpp"

namespace aeroprint::geom {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// Default numeric tolerances, shared across the geometry kernel.
namespace tol {
inline constexpr double kOnPlane = 1e-9;       // vertex-on-plane snap [m]
inline constexpr double kCoplanar = 1e-4;      // coplanarity distance [m]
inline constexpr double kParallel = 1e-3;      // normal parallelism [rad]
inline constexpr double kArea = 1e-10;         // meaningful contact area [m^2]
inline constexpr double kRelVolume = 1e-9;     // sliver volume, relative
}  // namespace tol

// A splitting plane given by a unit normal and a point on it. The half-space
// along the normal is "positive". Normals keep z >= 0 so positive always
// points upward-ish.
struct CutPlane {
  Vec3 normal{0, 0, 1};
  Vec3 origin{0, 0, 0};
  int id = -1;

  double offset() const { return normal.dot(origin); }
  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset(); }
  bool is_ground(double tolerance = tol::kParallel) const {
    return normal.cross(Vec3::UnitZ()).norm() <= tolerance;
  }
};

CutPlane make_plane(const Vec3& normal, const Vec3& origin, int id = -1);

// |(o_a - o_b) . n_a| for parallel planes; NotParallel otherwise.
double plane_distance(const CutPlane& a, const CutPlane& b,
                      double parallel_tol = tol::kParallel);

// Per-face provenance: caps produced by split_mesh record the generating
// plane and which side of it this mesh lies on (-1 negative, +1 positive).
struct FaceTag {
  bool from_cut = false;
  std::int8_t side = 0;
  int plane_id = -1;
  Vec3 plane_normal = Vec3::Zero();
  double plane_offset = 0.0;
};

// Indexed triangle soup, counter-clockwise outward orientation. `tags` is
// parallel to `faces` when non-empty (it always is for meshes produced by
// this kernel).
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<FaceTag> tags;

  bool empty() const { return faces.empty(); }
  void add_face(int a, int b, int c, const FaceTag& tag = {}) {
    faces.push_back({a, b, c});
    tags.push_back(tag);
  }
  Vec3 face_normal(int f) const;   // unit, zero for degenerate faces
  double face_area(int f) const;
  Vec3 face_centroid(int f) const;
};

// Signed divergence-theorem volume [m^3]; positive for outward orientation.
double mesh_volume(const TriangleMesh& mesh);
inline double mesh_volume_liters(const TriangleMesh& mesh) {
  return mesh_volume(mesh) * 1e3;
}

// Every undirected edge shared by exactly two faces, once per direction.
bool is_closed(const TriangleMesh& mesh);
void require_closed(const TriangleMesh& mesh, const char* where);

Vec3 volume_centroid(const TriangleMesh& mesh);
void mesh_bounds(const TriangleMesh& mesh, Vec3& lo, Vec3& hi);

// Interval of n.v over all vertices.
void support_interval(const TriangleMesh& mesh, const Vec3& normal,
                      double& smin, double& smax);

// Merges duplicate vertices (exact coordinates) and drops degenerate and
// unreferenced entries. Meshes built by the splitter share coordinates
// exactly, so no quantization is involved.
TriangleMesh weld(const TriangleMesh& mesh);

// Weld with a proximity tolerance, for seams rebuilt from projected
// coordinates where the last bits differ.
TriangleMesh weld_tolerant(const TriangleMesh& mesh, double eps = 1e-9);

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& d);
TriangleMesh rotated_z(const TriangleMesh& mesh, double angle);

// Axis-aligned box [lo, hi].
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);

// Prism obtained by extruding a polygon with holes from z=0 to z=height.
// Loops are 2D (x, y); outer counter-clockwise, holes clockwise.
TriangleMesh extrude_polygon(const std::vector<std::vector<Vec2>>& loops,
                             double height);

}  // namespace aeroprint::geom
