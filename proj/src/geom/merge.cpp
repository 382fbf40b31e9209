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

#include "aeroprint/geom/merge.hpp"

#include <algorithm>
#include <cmath>

#include "aeroprint/geom/polygon.hpp"

namespace aeroprint::geom {

namespace {

struct FaceRef {
  Vec3 p[3];
  FaceTag tag;
  double orient = 0;  // sign of normal . cluster normal
};

struct Cluster {
  Vec3 normal;  // canonical
  double offset = 0;
  std::vector<FaceRef> faces;
};

Polygon2D clip_halfplane(const Polygon2D& poly, const Vec2& a, const Vec2& b,
                         bool keep_left) {
  Polygon2D out;
  const Vec2 dir = b - a;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    double dp = dir.x() * (p - a).y() - dir.y() * (p - a).x();
    double dq = dir.x() * (q - a).y() - dir.y() * (q - a).x();
    if (!keep_left) {
      dp = -dp;
      dq = -dq;
    }
    if (dp >= 0) out.push_back(p);
    if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0))
      out.push_back(p + (dp / (dp - dq)) * (q - p));
  }
  return out;
}

// P \ T for convex CCW polygons, returned as convex pieces.
void convex_difference(const Polygon2D& piece, const Polygon2D& tri,
                       std::vector<Polygon2D>& out, bool& modified) {
  Polygon2D cur = piece;
  std::vector<Polygon2D> outside;
  for (size_t e = 0; e < tri.size() && cur.size() >= 3; ++e) {
    const Vec2& a = tri[e];
    const Vec2& b = tri[(e + 1) % tri.size()];
    Polygon2D off = clip_halfplane(cur, a, b, false);
    if (off.size() >= 3 && std::abs(signed_area(off)) > tol::kArea)
      outside.push_back(std::move(off));
    cur = clip_halfplane(cur, a, b, true);
  }
  const double inside_area =
      cur.size() >= 3 ? std::abs(signed_area(cur)) : 0.0;
  if (inside_area <= tol::kArea) {
    out.push_back(piece);  // no real overlap, keep intact
    return;
  }
  modified = true;
  for (auto& p : outside) out.push_back(std::move(p));
}

}  // namespace

TriangleMesh merge_cells(const std::vector<TriangleMesh>& cells) {
  TriangleMesh out;
  std::vector<Cluster> clusters;
  std::vector<FaceRef> degenerate_pass;

  const auto canonical = [](Vec3 n) {
    if (n.z() < 0 || (n.z() == 0 && (n.x() < 0 || (n.x() == 0 && n.y() < 0))))
      n = -n;
    return n;
  };

  for (const auto& cell : cells) {
    for (size_t f = 0; f < cell.faces.size(); ++f) {
      FaceRef ref;
      for (int k = 0; k < 3; ++k) ref.p[k] = cell.vertices[cell.faces[f][k]];
      ref.tag = f < cell.tags.size() ? cell.tags[f] : FaceTag{};
      const Vec3 n = cell.face_normal(static_cast<int>(f));
      if (n.isZero() || cell.face_area(static_cast<int>(f)) <= tol::kArea) continue;
      const Vec3 cn = canonical(n);
      const double off = cn.dot(ref.p[0]);
      Cluster* home = nullptr;
      for (auto& c : clusters) {
        if (c.normal.cross(cn).norm() <= tol::kParallel &&
            std::abs(c.offset - off) <= tol::kCoplanar) {
          home = &c;
          break;
        }
      }
      if (!home) {
        clusters.push_back({cn, off, {}});
        home = &clusters.back();
      }
      ref.orient = n.dot(home->normal) > 0 ? 1.0 : -1.0;
      home->faces.push_back(std::move(ref));
    }
  }

  const auto emit_face = [&](const Vec3& a, const Vec3& b, const Vec3& c,
                             const FaceTag& tag) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.push_back(a);
    out.vertices.push_back(b);
    out.vertices.push_back(c);
    out.add_face(base, base + 1, base + 2, tag);
  };

  for (const auto& cluster : clusters) {
    bool has_up = false, has_down = false;
    for (const auto& f : cluster.faces) (f.orient > 0 ? has_up : has_down) = true;
    if (!has_up || !has_down) {
      for (const auto& f : cluster.faces) emit_face(f.p[0], f.p[1], f.p[2], f.tag);
      continue;
    }

    Vec3 u, v;
    plane_basis(cluster.normal, u, v);
    const Vec3 origin = cluster.faces.front().p[0];
    const auto project = [&](const Vec3& p) {
      const Vec3 d = p - origin;
      return Vec2(u.dot(d), v.dot(d));
    };
    struct Flat {
      Polygon2D tri;  // CCW
      const FaceRef* src;
    };
    std::vector<Flat> up, down;
    for (const auto& f : cluster.faces) {
      Polygon2D t{project(f.p[0]), project(f.p[1]), project(f.p[2])};
      if (signed_area(t) < 0) std::swap(t[1], t[2]);
      (f.orient > 0 ? up : down).push_back({std::move(t), &f});
    }

    const auto subtract_side = [&](const std::vector<Flat>& keep,
                                   const std::vector<Flat>& other) {
      for (const auto& f : keep) {
        std::vector<Polygon2D> pieces{f.tri};
        bool modified = false;
        for (const auto& o : other) {
          std::vector<Polygon2D> next;
          for (const auto& piece : pieces) convex_difference(piece, o.tri, next, modified);
          pieces.swap(next);
          if (pieces.empty()) break;
        }
        if (!modified) {
          emit_face(f.src->p[0], f.src->p[1], f.src->p[2], f.src->tag);
          continue;
        }
        const bool flip = f.src->orient < 0;
        for (const auto& piece : pieces) {
          for (size_t k = 1; k + 1 < piece.size(); ++k) {
            const Vec3 a = origin + u * piece[0].x() + v * piece[0].y();
            const Vec3 b = origin + u * piece[k].x() + v * piece[k].y();
            const Vec3 c = origin + u * piece[k + 1].x() + v * piece[k + 1].y();
            if (flip)
              emit_face(a, c, b, f.src->tag);
            else
              emit_face(a, b, c, f.src->tag);
          }
        }
      }
    };
    subtract_side(up, down);
    subtract_side(down, up);
  }

  return repair_tjunctions(weld_tolerant(out));
}

TriangleMesh repair_tjunctions(const TriangleMesh& mesh) {
  TriangleMesh m = weld(mesh);
  constexpr double kDist = 1e-9;
  for (int pass = 0; pass < 16; ++pass) {
    bool changed = false;
    TriangleMesh next;
    next.vertices = m.vertices;
    for (size_t f = 0; f < m.faces.size(); ++f) {
      const auto& t = m.faces[f];
      const FaceTag tag = f < m.tags.size() ? m.tags[f] : FaceTag{};
      int split_edge = -1, split_vertex = -1;
      for (int e = 0; e < 3 && split_edge < 0; ++e) {
        const int ia = t[e], ib = t[(e + 1) % 3];
        const Vec3& a = m.vertices[ia];
        const Vec3& b = m.vertices[ib];
        const Vec3 ab = b - a;
        const double len2 = ab.squaredNorm();
        if (len2 < kDist * kDist) continue;
        const double len = std::sqrt(len2);
        double best_t = 2;
        for (size_t w = 0; w < m.vertices.size(); ++w) {
          if (static_cast<int>(w) == ia || static_cast<int>(w) == ib) continue;
          const Vec3 d = m.vertices[w] - a;
          const double tt = d.dot(ab) / len2;
          if (tt * len < kDist || (1 - tt) * len < kDist) continue;
          if ((d - tt * ab).norm() > kDist) continue;
          if (tt < best_t) {
            best_t = tt;
            split_vertex = static_cast<int>(w);
            split_edge = e;
          }
        }
      }
      if (split_edge < 0) {
        next.add_face(t[0], t[1], t[2], tag);
      } else {
        const int ia = t[split_edge];
        const int ib = t[(split_edge + 1) % 3];
        const int ic = t[(split_edge + 2) % 3];
        next.add_face(ia, split_vertex, ic, tag);
        next.add_face(split_vertex, ib, ic, tag);
        changed = true;
      }
    }
    m = std::move(next);
    if (!changed) break;
  }
  return weld(m);
}

}  // namespace aeroprint::geom
