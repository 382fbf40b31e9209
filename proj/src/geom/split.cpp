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

#include "aeroprint/geom/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace aeroprint::geom {

namespace {

// Points where the plane meets the mesh live in a pool so that segment
// endpoints chain by identity, not by coordinate comparison. A pool entry
// is either an original on-plane vertex or a cached edge crossing.
struct CutPool {
  std::vector<Vec3> points;
  std::unordered_map<std::int64_t, int> edge_cache;  // (min,max) packed
  std::unordered_map<int, int> vertex_cache;

  int from_vertex(int v, const Vec3& p) {
    auto [it, inserted] = vertex_cache.try_emplace(v, static_cast<int>(points.size()));
    if (inserted) points.push_back(p);
    return it->second;
  }
  int from_edge(int a, int b, const std::vector<Vec3>& verts,
                const std::vector<double>& dist) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    const std::int64_t key = (static_cast<std::int64_t>(lo) << 32) | hi;
    auto [it, inserted] = edge_cache.try_emplace(key, static_cast<int>(points.size()));
    if (inserted) {
      const double dl = dist[lo], dh = dist[hi];
      const double t = dl / (dl - dh);
      points.push_back(verts[lo] + t * (verts[hi] - verts[lo]));
    }
    return it->second;
  }
};

struct PlaneCut {
  std::vector<double> dist;                   // snapped signed distances
  CutPool pool;
  std::vector<std::pair<int, int>> segments;  // pool ids
  // In-plane edges show up once per adjacent face; only edges seen from both
  // sides belong to the cut boundary.
  std::map<std::pair<int, int>, int> flat_edges;  // (pool ids) -> side mask

  void add_flat_edge(int pa, int pb, int side) {
    auto key = std::minmax(pa, pb);
    flat_edges[{key.first, key.second}] |= (side < 0 ? 1 : 2);
  }
  void finish_segments() {
    for (const auto& [e, mask] : flat_edges)
      if (mask == 3) segments.push_back(e);
  }
};

int face_plane_side(const TriangleMesh& mesh, int f, const CutPlane& plane) {
  // Whole-face-on-plane tie-break: the face stays with the solid it bounds.
  const double d = mesh.face_normal(f).dot(plane.normal);
  return d >= 0 ? -1 : +1;
}

// Chains cut segments into closed loops of pool ids. Open chains (numeric
// residue from grazing contacts) are dropped.
std::vector<std::vector<int>> chain_loops(const std::vector<std::pair<int, int>>& segments) {
  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& [a, b] : segments) {
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::vector<int>> loops;
  std::unordered_map<std::int64_t, bool> used;
  const auto ekey = [](int a, int b) {
    return (static_cast<std::int64_t>(std::min(a, b)) << 32) | std::max(a, b);
  };
  for (const auto& [start, nbrs] : adj) {
    for (int first : nbrs) {
      if (used[ekey(start, first)]) continue;
      std::vector<int> chain{start, first};
      used[ekey(start, first)] = true;
      while (chain.back() != start) {
        const int cur = chain.back();
        const int prev = chain[chain.size() - 2];
        int next = -1;
        for (int cand : adj[cur]) {
          if (cand == prev && adj[cur].size() > 1) continue;
          if (used[ekey(cur, cand)]) continue;
          next = cand;
          break;
        }
        if (next < 0) break;
        used[ekey(cur, next)] = true;
        chain.push_back(next);
      }
      if (chain.size() >= 4 && chain.back() == start) {
        chain.pop_back();
        loops.push_back(std::move(chain));
      }
    }
  }
  return loops;
}

// Classifies faces against the plane, splitting the crossing ones. Emits
// per-side faces through `emit(side, a, b, c, tag)` with vertex handles:
// original indices >= 0, pool points encoded as -(pool_id + 1).
template <typename Emit>
PlaneCut classify(const TriangleMesh& mesh, const CutPlane& plane, Emit&& emit) {
  PlaneCut cut;
  const double off = plane.offset();
  cut.dist.resize(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    double d = plane.normal.dot(mesh.vertices[i]) - off;
    if (std::abs(d) < tol::kOnPlane) d = 0;
    cut.dist[i] = d;
  }
  const auto pool_handle = [&](int pid) { return -(pid + 1); };

  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    const FaceTag tag = f < mesh.tags.size() ? mesh.tags[f] : FaceTag{};
    const double d0 = cut.dist[t[0]], d1 = cut.dist[t[1]], d2 = cut.dist[t[2]];
    const int nneg = (d0 < 0) + (d1 < 0) + (d2 < 0);
    const int npos = (d0 > 0) + (d1 > 0) + (d2 > 0);
    const int nzero = 3 - nneg - npos;

    if (npos == 0 && nneg == 0) {
      const int side = face_plane_side(mesh, static_cast<int>(f), plane);
      emit(side, t[0], t[1], t[2], tag);
      for (int e = 0; e < 3; ++e) {
        const int a = t[e], b = t[(e + 1) % 3];
        cut.add_flat_edge(cut.pool.from_vertex(a, mesh.vertices[a]),
                          cut.pool.from_vertex(b, mesh.vertices[b]), side);
      }
      continue;
    }
    if (npos == 0 || nneg == 0) {
      const int side = npos == 0 ? -1 : +1;
      emit(side, t[0], t[1], t[2], tag);
      if (nzero == 2) {
        int za = -1, zb = -1;
        for (int k = 0; k < 3; ++k)
          if (cut.dist[t[k]] == 0) (za < 0 ? za : zb) = t[k];
        cut.add_flat_edge(cut.pool.from_vertex(za, mesh.vertices[za]),
                          cut.pool.from_vertex(zb, mesh.vertices[zb]), side);
      }
      continue;
    }

    if (nzero == 1) {
      // Plane through one vertex, crossing the opposite edge.
      int z = 0;
      while (cut.dist[t[z]] != 0) ++z;
      const int a = t[(z + 1) % 3], b = t[(z + 2) % 3];
      const int pid = cut.pool.from_edge(a, b, mesh.vertices, cut.dist);
      const int pz = cut.pool.from_vertex(t[z], mesh.vertices[t[z]]);
      const int sa = cut.dist[a] > 0 ? +1 : -1;
      emit(sa, t[z], a, pool_handle(pid), tag);
      emit(-sa, t[z], pool_handle(pid), b, tag);
      cut.segments.emplace_back(pz, pid);
      continue;
    }

    // General crossing: one vertex alone on its side.
    int lone = 0;
    const int lone_sign = npos == 1 ? +1 : -1;
    for (int k = 0; k < 3; ++k) {
      const double d = cut.dist[t[k]];
      if ((lone_sign > 0 && d > 0) || (lone_sign < 0 && d < 0)) lone = k;
    }
    const int l = t[lone], m = t[(lone + 1) % 3], n2 = t[(lone + 2) % 3];
    const int p = cut.pool.from_edge(l, m, mesh.vertices, cut.dist);
    const int q = cut.pool.from_edge(n2, l, mesh.vertices, cut.dist);
    emit(lone_sign, l, pool_handle(p), pool_handle(q), tag);
    emit(-lone_sign, pool_handle(p), m, n2, tag);
    emit(-lone_sign, pool_handle(p), n2, pool_handle(q), tag);
    cut.segments.emplace_back(p, q);
  }
  cut.finish_segments();
  return cut;
}

struct CapGroup {
  LoopGroup group;
  std::vector<int> pool_ids;  // concatenated [outer, holes...] order
};

// Orients and nests pool-id loops; mirrors group_loops but keeps ids.
std::vector<CapGroup> build_cap_groups(const CutPool& pool,
                                       std::vector<std::vector<int>> id_loops,
                                       const Vec3& u, const Vec3& v,
                                       const Vec3& origin) {
  struct Entry {
    Polygon2D poly;
    std::vector<int> ids;
    double area = 0;
    int depth = 0;
  };
  std::vector<Entry> entries;
  for (auto& ids : id_loops) {
    Entry e;
    e.ids = std::move(ids);
    for (int id : e.ids) {
      const Vec3 d = pool.points[id] - origin;
      e.poly.emplace_back(u.dot(d), v.dot(d));
    }
    e.area = signed_area(e.poly);
    if (std::abs(e.area) > tol::kArea) entries.push_back(std::move(e));
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    Vec2 probe = entries[i].poly[0];
    for (const auto& p : entries[i].poly)
      if (p.x() > probe.x() || (p.x() == probe.x() && p.y() > probe.y())) probe = p;
    for (size_t j = 0; j < entries.size(); ++j)
      if (i != j && point_in_polygon(probe, entries[j].poly)) ++entries[i].depth;
  }
  for (auto& e : entries) {
    const bool want_ccw = (e.depth % 2) == 0;
    if ((e.area > 0) != want_ccw) {
      std::reverse(e.poly.begin(), e.poly.end());
      std::reverse(e.ids.begin(), e.ids.end());
    }
  }
  std::vector<CapGroup> groups;
  std::vector<int> group_of(entries.size(), -1);
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].depth % 2 != 0) continue;
    group_of[i] = static_cast<int>(groups.size());
    CapGroup g;
    g.group.outer = entries[i].poly;
    g.pool_ids = entries[i].ids;
    groups.push_back(std::move(g));
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].depth % 2 == 0) continue;
    int parent = -1;
    double parent_area = std::numeric_limits<double>::infinity();
    const Vec2 probe = entries[i].poly[0];
    for (size_t j = 0; j < entries.size(); ++j) {
      if (group_of[j] < 0) continue;
      if (!point_in_polygon(probe, entries[j].poly)) continue;
      if (std::abs(entries[j].area) < parent_area) {
        parent_area = std::abs(entries[j].area);
        parent = group_of[j];
      }
    }
    if (parent < 0) continue;  // orphan sliver
    groups[parent].group.holes.push_back(entries[i].poly);
    groups[parent].pool_ids.insert(groups[parent].pool_ids.end(),
                                   entries[i].ids.begin(), entries[i].ids.end());
  }
  return groups;
}

}  // namespace

SplitResult split_mesh(const TriangleMesh& mesh, const CutPlane& plane) {
  require_closed(mesh, "split_mesh");
  const double vol_in = mesh_volume(mesh);

  // Fast path: the plane misses (or merely grazes) the mesh.
  {
    const double off = plane.offset();
    bool any_pos = false, any_neg = false;
    for (const auto& v : mesh.vertices) {
      const double d = plane.normal.dot(v) - off;
      if (d >= tol::kOnPlane) any_pos = true;
      if (d <= -tol::kOnPlane) any_neg = true;
      if (any_pos && any_neg) break;
    }
    if (!any_pos) return {mesh, TriangleMesh{}};
    if (!any_neg) return {TriangleMesh{}, mesh};
  }

  struct Builder {
    TriangleMesh m;
    std::unordered_map<int, int> vert_map;  // original index -> local
    std::unordered_map<int, int> pool_map;  // pool id -> local
  };
  Builder sides[2];  // 0 = negative, 1 = positive

  std::vector<std::tuple<int, int, int, int, FaceTag>> pending;
  PlaneCut cut = classify(mesh, plane,
                          [&](int side, int a, int b, int c, const FaceTag& tag) {
                            pending.emplace_back(side, a, b, c, tag);
                          });

  const auto resolve = [&](Builder& b, int h) {
    if (h >= 0) {
      auto [it, inserted] = b.vert_map.try_emplace(h, static_cast<int>(b.m.vertices.size()));
      if (inserted) b.m.vertices.push_back(mesh.vertices[h]);
      return it->second;
    }
    const int pid = -h - 1;
    auto [it, inserted] = b.pool_map.try_emplace(pid, static_cast<int>(b.m.vertices.size()));
    if (inserted) b.m.vertices.push_back(cut.pool.points[pid]);
    return it->second;
  };
  for (const auto& [side, a, b, c, tag] : pending) {
    Builder& bl = sides[side < 0 ? 0 : 1];
    const int ia = resolve(bl, a);
    const int ib = resolve(bl, b);
    const int ic = resolve(bl, c);
    if (ia == ib || ib == ic || ia == ic) continue;
    bl.m.add_face(ia, ib, ic, tag);
  }

  if (sides[0].m.faces.empty()) return {TriangleMesh{}, mesh};
  if (sides[1].m.faces.empty()) return {mesh, TriangleMesh{}};

  // Cap both sides with the same triangulation of the cut loops. The (u, v)
  // basis is right-handed with the plane normal, so CCW cap triangles face
  // +n: outward for the negative side, flipped for the positive one.
  Vec3 u, v;
  plane_basis(plane.normal, u, v);
  const FaceTag neg_tag{true, -1, plane.id, plane.normal, plane.offset()};
  const FaceTag pos_tag{true, +1, plane.id, plane.normal, plane.offset()};
  for (const auto& cap : build_cap_groups(cut.pool, chain_loops(cut.segments),
                                          u, v, plane.origin)) {
    for (const auto& t : triangulate_group(cap.group)) {
      const int pid0 = cap.pool_ids[t[0]];
      const int pid1 = cap.pool_ids[t[1]];
      const int pid2 = cap.pool_ids[t[2]];
      const int n0 = resolve(sides[0], -(pid0 + 1));
      const int n1 = resolve(sides[0], -(pid1 + 1));
      const int n2 = resolve(sides[0], -(pid2 + 1));
      if (n0 != n1 && n1 != n2 && n0 != n2) sides[0].m.add_face(n0, n1, n2, neg_tag);
      const int p0 = resolve(sides[1], -(pid0 + 1));
      const int p1 = resolve(sides[1], -(pid1 + 1));
      const int p2 = resolve(sides[1], -(pid2 + 1));
      if (p0 != p1 && p1 != p2 && p0 != p2) sides[1].m.add_face(p0, p2, p1, pos_tag);
    }
  }

  SplitResult out{weld(sides[0].m), weld(sides[1].m)};
  const double vn = mesh_volume(out.negative);
  const double vp = mesh_volume(out.positive);
  const double sliver = std::max(1e-12, tol::kRelVolume * std::abs(vol_in));
  if (vn < sliver || vp < sliver)
    throw DegenerateCut("split_mesh: sliver output below tolerance");
  return out;
}

namespace {

std::vector<Polygon2D> section_loops(const TriangleMesh& mesh, const CutPlane& plane,
                                     const Vec3& u, const Vec3& v) {
  PlaneCut cut = classify(mesh, plane, [](int, int, int, int, const FaceTag&) {});
  std::vector<Polygon2D> loops;
  for (const auto& ids : chain_loops(cut.segments)) {
    Polygon2D loop;
    loop.reserve(ids.size());
    for (int id : ids) {
      const Vec3 d = cut.pool.points[id] - plane.origin;
      loop.emplace_back(u.dot(d), v.dot(d));
    }
    if (std::abs(signed_area(loop)) > tol::kArea) loops.push_back(std::move(loop));
  }
  std::vector<Polygon2D> out;
  for (auto& g : group_loops(std::move(loops))) {
    out.push_back(std::move(g.outer));
    for (auto& h : g.holes) out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

std::vector<Polygon2D> cross_section(const TriangleMesh& mesh, const CutPlane& plane) {
  Vec3 u, v;
  plane_basis(plane.normal, u, v);
  return section_loops(mesh, plane, u, v);
}

std::vector<Polygon2D> cross_section_z(const TriangleMesh& mesh, double height) {
  const CutPlane plane = make_plane(Vec3::UnitZ(), Vec3(0, 0, height));
  return section_loops(mesh, plane, Vec3::UnitX(), Vec3::UnitY());
}

}  // namespace aeroprint::geom
