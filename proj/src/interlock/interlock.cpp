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

#include "aeroprint/interlock/interlock.hpp"

#include <algorithm>
#include <cmath>

#include "aeroprint/geom/merge.hpp"
#include "aeroprint/geom/polygon.hpp"
#include "aeroprint/geom/split.hpp"

namespace aeroprint::interlock {

namespace {

using geom::Vec3;

// z-extent of the actual contact region between two coplanar cut faces.
bool contact_zrange(const Chunk& upper, const plan::CutFace& fu,
                    const Chunk& lower, const plan::CutFace& fl,
                    double& z_lo, double& z_hi) {
  Vec3 u, v;
  geom::plane_basis(fu.plane_normal, u, v);
  const Vec3 origin = fu.plane_normal * fu.plane_offset;
  const auto project = [&](const TriangleMesh& m, int f, geom::Vec2 out[3]) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = m.vertices[m.faces[f][k]] - origin;
      out[k] = geom::Vec2(u.dot(d), v.dot(d));
    }
  };
  bool any = false;
  geom::Vec2 ta[3], tb[3];
  for (int i : fu.triangles) {
    if (upper.mesh.face_area(i) <= geom::tol::kArea) continue;
    project(upper.mesh, i, ta);
    geom::Polygon2D pa{ta[0], ta[1], ta[2]};
    if (geom::signed_area(pa) < 0) std::swap(pa[1], pa[2]);
    for (int j : fl.triangles) {
      if (lower.mesh.face_area(j) <= geom::tol::kArea) continue;
      project(lower.mesh, j, tb);
      geom::Polygon2D pb{tb[0], tb[1], tb[2]};
      if (geom::signed_area(pb) < 0) std::swap(pb[1], pb[2]);
      const auto clipped = geom::clip_convex(pa, pb);
      if (clipped.size() < 3 || std::abs(geom::signed_area(clipped)) <= geom::tol::kArea)
        continue;
      any = true;
      for (const auto& p : clipped) {
        const double z = (origin + u * p.x() + v * p.y()).z();
        z_lo = std::min(z_lo, z);
        z_hi = std::max(z_hi, z);
      }
    }
  }
  return any;
}

bool strictly_inclined(const Vec3& n) {
  const bool horizontal = n.cross(Vec3::UnitZ()).norm() <= geom::tol::kParallel;
  const bool too_steep = n.z() < std::cos(plan::kMaxDependencyAngle);
  return !horizontal && !too_steep;
}

// Splits off the negative side of `mesh` against `plane`; grazing planes
// resolve into "all on one side".
void split_or_side(const TriangleMesh& mesh, const geom::CutPlane& plane,
                   TriangleMesh& neg, TriangleMesh& pos) {
  try {
    auto r = geom::split_mesh(mesh, plane);
    neg = std::move(r.negative);
    pos = std::move(r.positive);
  } catch (const DegenerateCut&) {
    double smin, smax;
    geom::support_interval(mesh, plane.normal, smin, smax);
    const double mid = plane.offset();
    if (mid - smin > smax - mid) {
      neg = mesh;
      pos = TriangleMesh{};
    } else {
      neg = TriangleMesh{};
      pos = mesh;
    }
  }
}

}  // namespace

std::vector<ContactPair> contact_pairs(
    const std::vector<std::shared_ptr<const Chunk>>& chunks,
    const plan::DependencyGraph& graph) {
  std::vector<ContactPair> out;
  for (const auto& [i, j] : graph.edges) {
    const auto upper_faces = plan::cut_faces(*chunks[i]);
    const auto lower_faces = plan::cut_faces(*chunks[j]);
    for (const auto& fu : upper_faces) {
      if (fu.side <= 0 || !strictly_inclined(fu.plane_normal)) continue;
      bool found = false;
      for (const auto& fl : lower_faces) {
        if (fl.side >= 0) continue;
        if (fu.plane_normal.cross(fl.plane_normal).norm() > geom::tol::kParallel)
          continue;
        if (std::abs(fu.plane_offset - fl.plane_offset) > geom::tol::kCoplanar)
          continue;
        if (geom::face_polygon_overlap(chunks[i]->mesh, fu.triangles,
                                       chunks[j]->mesh, fl.triangles) >
            geom::tol::kArea) {
          found = true;
          break;
        }
      }
      if (found) {
        ContactPair pair;
        pair.top_id = i;
        pair.bottom_id = j;
        pair.shared = geom::make_plane(fu.plane_normal,
                                       fu.plane_normal * fu.plane_offset,
                                       fu.plane_id);
        out.push_back(pair);
        break;  // one pair per edge
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ContactPair& a, const ContactPair& b) {
    return std::tie(a.bottom_id, a.top_id) < std::tie(b.bottom_id, b.top_id);
  });
  return out;
}

std::pair<TriangleMesh, TriangleMesh> interlock_pair(const TriangleMesh& bottom,
                                                     const TriangleMesh& top,
                                                     const CutPlane& shared,
                                                     double layer_height,
                                                     int& next_plane_id) {
  if (!(layer_height > 0)) throw Error("interlock_pair: layer height must be positive");
  if (!strictly_inclined(shared.normal))
    return {bottom, top};  // horizontal interface: nothing to do

  // Contact z-extent from the chunks' shared-plane faces.
  const auto top_chunk = chunker::make_chunk(top, {});
  const auto bottom_chunk = chunker::make_chunk(bottom, {});
  double z_lo = std::numeric_limits<double>::infinity();
  double z_hi = -z_lo;
  bool found = false;
  for (const auto& fu : plan::cut_faces(*top_chunk)) {
    if (fu.side <= 0) continue;
    if (fu.plane_normal.cross(shared.normal).norm() > geom::tol::kParallel) continue;
    if (std::abs(fu.plane_offset - shared.offset()) > geom::tol::kCoplanar) continue;
    for (const auto& fl : plan::cut_faces(*bottom_chunk)) {
      if (fl.side >= 0) continue;
      if (fl.plane_normal.cross(shared.normal).norm() > geom::tol::kParallel) continue;
      if (std::abs(fl.plane_offset - shared.offset()) > geom::tol::kCoplanar) continue;
      if (contact_zrange(*top_chunk, fu, *bottom_chunk, fl, z_lo, z_hi)) found = true;
    }
  }
  if (!found) throw DegenerateInterface("interlock_pair: no planar contact found");

  // Interior layer planes of the global grid strictly inside the interface.
  std::vector<double> grid;
  const int i_first = static_cast<int>(std::ceil(z_lo / layer_height - 1e-9)) ;
  for (int i = std::max(1, i_first); i * layer_height < z_hi - 1e-9; ++i) {
    const double z = i * layer_height;
    if (z > z_lo + 1e-9) grid.push_back(z);
  }
  if (grid.empty())
    throw DegenerateInterface("interlock_pair: interface shorter than one layer");

  // Clip the top chunk to the interface band, then into layer slabs.
  const auto zplane = [&](double z) {
    return geom::make_plane(Vec3::UnitZ(), Vec3(0, 0, z), next_plane_id++);
  };
  TriangleMesh below, band, above;
  split_or_side(top, zplane(z_lo), below, band);
  split_or_side(band, zplane(z_hi), band, above);

  struct Slab {
    TriangleMesh mesh;
    double base;  // z of the wedge-defining line
  };
  std::vector<Slab> slabs;
  TriangleMesh cur = band;
  double base = z_lo;
  for (double z : grid) {
    TriangleMesh lower, upper;
    split_or_side(cur, zplane(z), lower, upper);
    if (!lower.empty()) slabs.push_back({std::move(lower), base});
    cur = std::move(upper);
    base = z;
  }
  if (!cur.empty()) slabs.push_back({std::move(cur), base});

  // Per slab: vertical plane through the interface line at the slab base;
  // the sliver behind it (toward the bottom chunk) changes owner.
  const Vec3 n = shared.normal;
  const double s = std::hypot(n.x(), n.y());
  const Vec3 h = Vec3(n.x(), n.y(), 0) / s;
  std::vector<TriangleMesh> top_cells, bottom_cells{bottom};
  if (!below.empty()) top_cells.push_back(std::move(below));
  if (!above.empty()) top_cells.push_back(std::move(above));
  for (auto& slab : slabs) {
    const double c = (shared.offset() - n.z() * slab.base) / s;
    auto vplane = geom::make_plane(h, h * c, next_plane_id++);
    TriangleMesh neg, pos;
    split_or_side(slab.mesh, vplane, neg, pos);
    // make_plane may flip a vertical normal; the wedge is the side opposite h.
    const bool flipped = vplane.normal.dot(h) < 0;
    TriangleMesh& wedge = flipped ? pos : neg;
    TriangleMesh& keep = flipped ? neg : pos;
    if (!wedge.empty()) bottom_cells.push_back(std::move(wedge));
    if (!keep.empty()) top_cells.push_back(std::move(keep));
  }

  TriangleMesh new_top = geom::merge_cells(top_cells);
  TriangleMesh new_bottom = geom::merge_cells(bottom_cells);
  geom::require_closed(new_top, "interlock_pair(top)");
  geom::require_closed(new_bottom, "interlock_pair(bottom)");

  const double v_in = geom::mesh_volume(bottom) + geom::mesh_volume(top);
  const double v_out = geom::mesh_volume(new_bottom) + geom::mesh_volume(new_top);
  if (std::abs(v_out - v_in) > 1e-6 * std::abs(v_in))
    throw Error("interlock_pair: volume not conserved");
  return {std::move(new_bottom), std::move(new_top)};
}

std::vector<std::shared_ptr<const Chunk>> interlock_all(
    const std::vector<std::shared_ptr<const Chunk>>& chunks,
    const plan::DependencyGraph& graph, double layer_height, int next_plane_id) {
  std::vector<TriangleMesh> meshes;
  meshes.reserve(chunks.size());
  for (const auto& c : chunks) meshes.push_back(c->mesh);

  for (const auto& pair : contact_pairs(chunks, graph)) {
    auto [new_bottom, new_top] =
        interlock_pair(meshes[pair.bottom_id], meshes[pair.top_id], pair.shared,
                       layer_height, next_plane_id);
    meshes[pair.bottom_id] = std::move(new_bottom);
    meshes[pair.top_id] = std::move(new_top);
  }

  std::vector<std::shared_ptr<const Chunk>> out;
  out.reserve(chunks.size());
  for (size_t k = 0; k < chunks.size(); ++k) {
    auto chunk = std::make_shared<Chunk>(
        *chunker::make_chunk(std::move(meshes[k]), chunks[k]->generating_cuts));
    chunk->id = chunks[k]->id;
    out.push_back(chunk);
  }
  return out;
}

}  // namespace aeroprint::interlock
