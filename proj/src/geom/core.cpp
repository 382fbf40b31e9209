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

#include "aeroprint/geom/core.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "aeroprint/geom/polygon.hpp"

namespace aeroprint::geom {

CutPlane make_plane(const Vec3& normal, const Vec3& origin, int id) {
  const double n = normal.norm();
  if (!(n > 0) || !normal.allFinite()) throw Error("make_plane: bad normal");
  CutPlane p;
  p.normal = normal / n;
  // Upward convention: the vertical component of the normal stays positive.
  if (p.normal.z() < 0 ||
      (p.normal.z() == 0 &&
       (p.normal.x() < 0 || (p.normal.x() == 0 && p.normal.y() < 0)))) {
    p.normal = -p.normal;
  }
  p.origin = origin;
  p.id = id;
  return p;
}

double plane_distance(const CutPlane& a, const CutPlane& b, double parallel_tol) {
  const double cross = a.normal.cross(b.normal).norm();
  const double angle = std::asin(std::min(1.0, cross));
  if (angle > parallel_tol || a.normal.dot(b.normal) < 0)
    throw NotParallel("plane_distance: normals not parallel");
  return std::abs((a.origin - b.origin).dot(a.normal));
}

Vec3 TriangleMesh::face_normal(int f) const {
  const auto& t = faces[f];
  const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  const double len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3::Zero();
}

double TriangleMesh::face_area(int f) const {
  const auto& t = faces[f];
  return 0.5 * (vertices[t[1]] - vertices[t[0]])
                   .cross(vertices[t[2]] - vertices[t[0]])
                   .norm();
}

Vec3 TriangleMesh::face_centroid(int f) const {
  const auto& t = faces[f];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double mesh_volume(const TriangleMesh& mesh) {
  double six_v = 0;
  for (const auto& t : mesh.faces) {
    six_v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  return six_v / 6.0;
}

bool is_closed(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return false;
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(mesh.faces.size() * 3);
  const auto key = [&](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (const auto& t : mesh.faces) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++count[key(a, b)];
    }
  }
  for (const auto& [k, c] : count) {
    const int a = static_cast<int>(k >> 32);
    const int b = static_cast<int>(k & 0xffffffffu);
    auto rev = count.find(key(b, a));
    if (c != 1 || rev == count.end() || rev->second != 1) return false;
  }
  return true;
}

void require_closed(const TriangleMesh& mesh, const char* where) {
  if (!is_closed(mesh))
    throw NonManifoldInput(std::string(where) + ": mesh is not closed");
}

Vec3 volume_centroid(const TriangleMesh& mesh) {
  // Tetrahedron decomposition against the origin.
  double six_v = 0;
  Vec3 moment = Vec3::Zero();
  for (const auto& t : mesh.faces) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const double v = a.dot(b.cross(c));
    six_v += v;
    moment += v * (a + b + c) / 4.0;
  }
  if (std::abs(six_v) < 1e-300) return Vec3::Zero();
  return moment / six_v;
}

void mesh_bounds(const TriangleMesh& mesh, Vec3& lo, Vec3& hi) {
  if (mesh.vertices.empty()) throw EmptyMesh("mesh_bounds: empty mesh");
  lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  hi = -lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

void support_interval(const TriangleMesh& mesh, const Vec3& normal,
                      double& smin, double& smax) {
  if (mesh.vertices.empty()) throw EmptyMesh("support_interval: empty mesh");
  smin = std::numeric_limits<double>::infinity();
  smax = -smin;
  for (const auto& v : mesh.vertices) {
    const double s = normal.dot(v);
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
}

TriangleMesh weld(const TriangleMesh& mesh) {
  TriangleMesh out;
  out.vertices.reserve(mesh.vertices.size());
  std::map<std::array<double, 3>, int> index;
  std::vector<int> remap(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const std::array<double, 3> k{v.x(), v.y(), v.z()};
    auto [it, inserted] = index.try_emplace(k, static_cast<int>(out.vertices.size()));
    if (inserted) out.vertices.push_back(v);
    remap[i] = it->second;
  }
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const int a = remap[mesh.faces[f][0]];
    const int b = remap[mesh.faces[f][1]];
    const int c = remap[mesh.faces[f][2]];
    if (a == b || b == c || a == c) continue;
    out.add_face(a, b, c, f < mesh.tags.size() ? mesh.tags[f] : FaceTag{});
  }
  // Drop unreferenced vertices.
  std::vector<int> used(out.vertices.size(), -1);
  TriangleMesh packed;
  for (auto& t : out.faces) {
    for (int& idx : t) {
      if (used[idx] < 0) {
        used[idx] = static_cast<int>(packed.vertices.size());
        packed.vertices.push_back(out.vertices[idx]);
      }
      idx = used[idx];
    }
  }
  packed.faces = std::move(out.faces);
  packed.tags = std::move(out.tags);
  return packed;
}

TriangleMesh weld_tolerant(const TriangleMesh& mesh, double eps) {
  const double cell = eps * 8;
  std::map<std::array<std::int64_t, 3>, std::vector<int>> grid;  // cell -> reps
  std::vector<Vec3> reps;
  std::vector<int> remap(mesh.vertices.size());
  const auto cell_of = [&](const Vec3& v) {
    return std::array<std::int64_t, 3>{
        static_cast<std::int64_t>(std::floor(v.x() / cell)),
        static_cast<std::int64_t>(std::floor(v.y() / cell)),
        static_cast<std::int64_t>(std::floor(v.z() / cell))};
  };
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const auto c = cell_of(v);
    int found = -1;
    for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx)
      for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy)
        for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (int r : it->second)
            if ((reps[r] - v).lpNorm<Eigen::Infinity>() <= eps) {
              found = r;
              break;
            }
        }
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(v);
      grid[c].push_back(found);
    }
    remap[i] = found;
  }
  TriangleMesh out;
  out.vertices = std::move(reps);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const int a = remap[mesh.faces[f][0]];
    const int b = remap[mesh.faces[f][1]];
    const int c2 = remap[mesh.faces[f][2]];
    if (a == b || b == c2 || a == c2) continue;
    out.add_face(a, b, c2, f < mesh.tags.size() ? mesh.tags[f] : FaceTag{});
  }
  return weld(out);
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& d) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v += d;
  return out;
}

TriangleMesh rotated_z(const TriangleMesh& mesh, double angle) {
  TriangleMesh out = mesh;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  for (auto& v : out.vertices) v = r * v;
  for (auto& tag : out.tags)
    if (tag.from_cut) tag.plane_normal = r * tag.plane_normal;
  return out;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  m.vertices = {
      {lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
      {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
      {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
      {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()},
  };
  const int quads[6][4] = {
      {0, 3, 2, 1},  // bottom (outward -z)
      {4, 5, 6, 7},  // top
      {0, 1, 5, 4},  // y = lo
      {2, 3, 7, 6},  // y = hi
      {1, 2, 6, 5},  // x = hi
      {3, 0, 4, 7},  // x = lo
  };
  for (const auto& q : quads) {
    m.add_face(q[0], q[1], q[2]);
    m.add_face(q[0], q[2], q[3]);
  }
  return m;
}

TriangleMesh extrude_polygon(const std::vector<std::vector<Vec2>>& loops,
                             double height) {
  if (loops.empty() || height <= 0)
    throw Error("extrude_polygon: empty loops or non-positive height");
  std::vector<Polygon2D> input(loops.begin(), loops.end());
  const auto groups = group_loops(std::move(input));

  TriangleMesh m;
  for (const auto& g : groups) {
    std::vector<Polygon2D> all{g.outer};
    all.insert(all.end(), g.holes.begin(), g.holes.end());
    std::vector<int> base;  // bottom vertex index of first point per loop
    int offset = static_cast<int>(m.vertices.size());
    for (const auto& loop : all) {
      base.push_back(offset);
      for (const auto& p : loop) {
        m.vertices.emplace_back(p.x(), p.y(), 0.0);
        m.vertices.emplace_back(p.x(), p.y(), height);
      }
      offset += 2 * static_cast<int>(loop.size());
    }
    // Side walls. Outer loops are CCW so (next - cur) x z-up faces outward.
    for (size_t li = 0; li < all.size(); ++li) {
      const int n = static_cast<int>(all[li].size());
      for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const int b0 = base[li] + 2 * i, t0 = b0 + 1;
        const int b1 = base[li] + 2 * j, t1 = b1 + 1;
        m.add_face(b0, b1, t1);
        m.add_face(b0, t1, t0);
      }
    }
    // Caps share the wall vertices.
    const auto tris = triangulate_group(g);
    std::vector<int> flat;  // concatenated loop-local -> mesh bottom index
    for (size_t li = 0; li < all.size(); ++li)
      for (size_t i = 0; i < all[li].size(); ++i)
        flat.push_back(base[li] + 2 * static_cast<int>(i));
    for (const auto& t : tris) {
      m.add_face(flat[t[0]], flat[t[2]], flat[t[1]]);          // bottom, -z
      m.add_face(flat[t[0]] + 1, flat[t[1]] + 1, flat[t[2]] + 1);  // top, +z
    }
  }
  return weld(m);
}

}  // namespace aeroprint::geom
