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

#include "aeroprint/geom/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace aeroprint::geom {

namespace {

constexpr double kCoincide = 1e-12;
constexpr double kCrossEps = 1e-14;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool nearly_equal(const Vec2& a, const Vec2& b) {
  return (a - b).lpNorm<Eigen::Infinity>() <= kCoincide;
}

// Closed point-in-triangle with a small slack toward "inside".
bool in_triangle(const Vec2& q, const Vec2& a, const Vec2& b, const Vec2& c,
                 double eps = kCrossEps) {
  const double d1 = cross2(b - a, q - a);
  const double d2 = cross2(c - b, q - b);
  const double d3 = cross2(a - c, q - c);
  return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

}  // namespace

double signed_area(const Polygon2D& poly) {
  double twice = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) twice += cross2(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

bool point_in_polygon(const Vec2& p, const Polygon2D& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    if ((b.y() > p.y()) != (a.y() > p.y())) {
      const double x = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_loops(const Vec2& p, const std::vector<Polygon2D>& loops) {
  int crossings = 0;
  for (const auto& loop : loops) crossings += point_in_polygon(p, loop) ? 1 : 0;
  return (crossings % 2) == 1;
}

void plane_basis(const Vec3& normal, Vec3& u, Vec3& v) {
  const Vec3 n = normal.normalized();
  const Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  u = seed.cross(n).normalized();
  v = n.cross(u);
}

Polygon2D clip_convex(const Polygon2D& subject, const Polygon2D& clip) {
  Polygon2D out = subject;
  const size_t m = clip.size();
  for (size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % m];
    const Vec2 dir = b - a;
    Polygon2D in;
    in.swap(out);
    const size_t n = in.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % n];
      const double dp = cross2(dir, p - a);
      const double dq = cross2(dir, q - a);
      if (dp >= 0) out.push_back(p);
      if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)) {
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out;
}

double tri_tri_overlap_area(const Vec2& a0, const Vec2& a1, const Vec2& a2,
                            const Vec2& b0, const Vec2& b1, const Vec2& b2) {
  Polygon2D ta{a0, a1, a2}, tb{b0, b1, b2};
  if (signed_area(ta) < 0) std::swap(ta[1], ta[2]);
  if (signed_area(tb) < 0) std::swap(tb[1], tb[2]);
  if (signed_area(ta) <= kCrossEps || signed_area(tb) <= kCrossEps) return 0;
  const Polygon2D clipped = clip_convex(ta, tb);
  if (clipped.size() < 3) return 0;
  return std::abs(signed_area(clipped));
}

double face_polygon_overlap(const TriangleMesh& a, const std::vector<int>& fa,
                            const TriangleMesh& b, const std::vector<int>& fb) {
  if (fa.empty() || fb.empty()) return 0;
  // Reference plane from the first non-degenerate triangle of face a.
  Vec3 n = Vec3::Zero();
  Vec3 origin = Vec3::Zero();
  for (int f : fa) {
    if (a.face_area(f) > tol::kArea) {
      n = a.face_normal(f);
      origin = a.face_centroid(f);
      break;
    }
  }
  if (n.isZero()) return 0;

  const auto check = [&](const TriangleMesh& m, const std::vector<int>& fs) {
    for (int f : fs) {
      if (m.face_area(f) <= tol::kArea) continue;
      const Vec3 fn = m.face_normal(f);
      if (fn.cross(n).norm() > tol::kParallel)
        throw NotCoplanar("face_polygon_overlap: faces not parallel");
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = m.vertices[m.faces[f][k]];
        if (std::abs(n.dot(p - origin)) > tol::kCoplanar)
          throw NotCoplanar("face_polygon_overlap: faces not coplanar");
      }
    }
  };
  check(a, fa);
  check(b, fb);

  Vec3 u, v;
  plane_basis(n, u, v);
  const auto project = [&](const TriangleMesh& m, int f, Vec2 out[3]) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = m.vertices[m.faces[f][k]] - origin;
      out[k] = Vec2(u.dot(d), v.dot(d));
    }
  };
  double area = 0;
  Vec2 ta[3], tb[3];
  for (int i : fa) {
    if (a.face_area(i) <= tol::kArea) continue;
    project(a, i, ta);
    for (int j : fb) {
      if (b.face_area(j) <= tol::kArea) continue;
      project(b, j, tb);
      area += tri_tri_overlap_area(ta[0], ta[1], ta[2], tb[0], tb[1], tb[2]);
    }
  }
  return area;
}

namespace {

// Splices `hole` (CW) into `poly` (CCW working polygon over `pts`) through a
// bridge from the hole's rightmost vertex to a visible outer vertex.
void splice_hole(std::vector<int>& poly, const std::vector<int>& hole,
                 const std::vector<Vec2>& pts) {
  size_t mi = 0;
  for (size_t i = 1; i < hole.size(); ++i) {
    const Vec2& p = pts[hole[i]];
    const Vec2& q = pts[hole[mi]];
    if (p.x() > q.x() || (p.x() == q.x() && p.y() > q.y())) mi = i;
  }
  const Vec2 M = pts[hole[mi]];

  // Closest intersection of the +x ray from M with the outer boundary.
  double best_x = std::numeric_limits<double>::infinity();
  size_t best_edge = SIZE_MAX;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[poly[i]];
    const Vec2& b = pts[poly[(i + 1) % n]];
    if (a.y() == b.y()) continue;
    if ((a.y() > M.y()) == (b.y() > M.y())) continue;
    const double t = (M.y() - a.y()) / (b.y() - a.y());
    const double x = a.x() + t * (b.x() - a.x());
    if (x >= M.x() - kCoincide && x < best_x) {
      best_x = x;
      best_edge = i;
    }
  }
  if (best_edge == SIZE_MAX)
    throw Error("triangulate_group: hole outside outer loop");

  const Vec2 P(best_x, M.y());
  // Candidate bridge target: the endpoint of the hit edge lying right of M;
  // demoted to a reflex vertex inside triangle (M, P, candidate) if any.
  size_t vi = best_edge;
  {
    const Vec2& a = pts[poly[best_edge]];
    const Vec2& b = pts[poly[(best_edge + 1) % n]];
    vi = (a.x() > b.x()) ? best_edge : (best_edge + 1) % n;
    if (pts[poly[vi]].x() < M.x()) vi = (vi == best_edge) ? (best_edge + 1) % n : best_edge;
  }
  Vec2 V = pts[poly[vi]];
  double best_metric = std::numeric_limits<double>::infinity();
  size_t chosen = vi;
  for (size_t i = 0; i < n; ++i) {
    if (i == vi) continue;
    const Vec2& q = pts[poly[i]];
    if (q.x() < M.x()) continue;
    const Vec2& prev = pts[poly[(i + n - 1) % n]];
    const Vec2& next = pts[poly[(i + 1) % n]];
    const bool reflex = cross2(q - prev, next - q) < 0;
    if (!reflex) continue;
    if (!in_triangle(q, M, P, V) && !in_triangle(q, M, V, P)) continue;
    const Vec2 d = q - M;
    const double metric = std::abs(d.y()) / std::max(kCoincide, d.norm());
    if (metric < best_metric || (metric == best_metric && d.norm() < (pts[poly[chosen]] - M).norm())) {
      best_metric = metric;
      chosen = i;
    }
  }
  vi = chosen;

  // poly = [..v] + [M, hole after M.., M] ... + [v..]
  std::vector<int> merged;
  merged.reserve(poly.size() + hole.size() + 2);
  merged.insert(merged.end(), poly.begin(), poly.begin() + vi + 1);
  const size_t k = hole.size();
  for (size_t i = 0; i <= k; ++i) merged.push_back(hole[(mi + i) % k]);
  merged.push_back(poly[vi]);
  merged.insert(merged.end(), poly.begin() + vi + 1, poly.end());
  poly.swap(merged);
}

}  // namespace

std::vector<std::array<int, 3>> triangulate_group(const LoopGroup& group) {
  std::vector<Vec2> pts(group.outer.begin(), group.outer.end());
  std::vector<int> poly(pts.size());
  std::iota(poly.begin(), poly.end(), 0);
  if (signed_area(group.outer) < 0)
    throw Error("triangulate_group: outer loop must be CCW");

  std::vector<std::vector<int>> holes;
  for (const auto& h : group.holes) {
    std::vector<int> idx;
    for (const auto& p : h) {
      idx.push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
    holes.push_back(std::move(idx));
  }
  // Merge holes right-to-left so bridges never cross earlier ones.
  std::sort(holes.begin(), holes.end(), [&](const auto& a, const auto& b) {
    const auto mx = [&](const std::vector<int>& h) {
      double m = -std::numeric_limits<double>::infinity();
      for (int i : h) m = std::max(m, pts[i].x());
      return m;
    };
    return mx(a) > mx(b);
  });
  for (const auto& h : holes) splice_hole(poly, h, pts);

  std::vector<std::array<int, 3>> tris;
  tris.reserve(poly.size());
  std::vector<int> idx = poly;
  int stall = 0;
  while (idx.size() > 3) {
    const size_t n = idx.size();
    size_t clipped = SIZE_MAX;
    size_t degenerate = SIZE_MAX;
    size_t fallback = 0;
    double min_abs_cross = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k) {
      const Vec2& a = pts[idx[(k + n - 1) % n]];
      const Vec2& b = pts[idx[k]];
      const Vec2& c = pts[idx[(k + 1) % n]];
      const double cr = cross2(b - a, c - b);
      if (std::abs(cr) < min_abs_cross) {
        min_abs_cross = std::abs(cr);
        fallback = k;
      }
      if (cr < -kCrossEps) continue;
      bool blocked = false;
      for (size_t m = 0; m < n && !blocked; ++m) {
        if (m == k || m == (k + n - 1) % n || m == (k + 1) % n) continue;
        const Vec2& q = pts[idx[m]];
        if (nearly_equal(q, a) || nearly_equal(q, b) || nearly_equal(q, c)) continue;
        if (in_triangle(q, a, b, c)) blocked = true;
      }
      if (blocked) continue;
      if (cr <= kCrossEps) {
        if (degenerate == SIZE_MAX) degenerate = k;
        continue;
      }
      clipped = k;
      break;
    }
    if (clipped == SIZE_MAX) clipped = degenerate;
    if (clipped == SIZE_MAX) {
      // Numerical dead end; force progress on the flattest corner.
      clipped = fallback;
      if (++stall > static_cast<int>(poly.size()))
        throw Error("triangulate_group: ear clipping stalled");
    }
    const size_t k = clipped;
    tris.push_back({idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]});
    idx.erase(idx.begin() + k);
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

std::vector<LoopGroup> group_loops(std::vector<Polygon2D> loops) {
  const size_t n = loops.size();
  std::vector<double> area(n);
  std::vector<int> depth(n, 0);
  for (size_t i = 0; i < n; ++i) area[i] = signed_area(loops[i]);
  for (size_t i = 0; i < n; ++i) {
    // Extremal vertex is the least likely to sit on another loop.
    Vec2 probe = loops[i][0];
    for (const auto& p : loops[i])
      if (p.x() > probe.x() || (p.x() == probe.x() && p.y() > probe.y())) probe = p;
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (point_in_polygon(probe, loops[j])) ++depth[i];
    }
  }
  std::vector<LoopGroup> groups;
  std::vector<int> group_of(n, -1);
  for (size_t i = 0; i < n; ++i) {
    if (depth[i] % 2 != 0) continue;
    if (area[i] < 0) std::reverse(loops[i].begin(), loops[i].end());
    group_of[i] = static_cast<int>(groups.size());
    groups.push_back({loops[i], {}});
  }
  for (size_t i = 0; i < n; ++i) {
    if (depth[i] % 2 == 0) continue;
    if (area[i] > 0) std::reverse(loops[i].begin(), loops[i].end());
    // Parent: smallest even-depth loop containing this one.
    int parent = -1;
    double parent_area = std::numeric_limits<double>::infinity();
    Vec2 probe = loops[i][0];
    for (size_t j = 0; j < n; ++j) {
      if (group_of[j] < 0) continue;
      if (!point_in_polygon(probe, loops[j])) continue;
      if (std::abs(area[j]) < parent_area) {
        parent_area = std::abs(area[j]);
        parent = group_of[j];
      }
    }
    if (parent < 0) throw Error("group_loops: hole without containing loop");
    groups[parent].holes.push_back(loops[i]);
  }
  return groups;
}

namespace {

void dp_simplify(const Polygon2D& pts, size_t lo, size_t hi, double tolerance,
                 std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  const Vec2& a = pts[lo];
  const Vec2& b = pts[hi];
  const Vec2 ab = b - a;
  const double len = ab.norm();
  double worst = -1;
  size_t split = lo;
  for (size_t i = lo + 1; i < hi; ++i) {
    const double d = len > 0 ? std::abs(cross2(ab, pts[i] - a)) / len
                             : (pts[i] - a).norm();
    if (d > worst) {
      worst = d;
      split = i;
    }
  }
  if (worst > tolerance) {
    keep[split] = true;
    dp_simplify(pts, lo, split, tolerance, keep);
    dp_simplify(pts, split, hi, tolerance, keep);
  }
}

}  // namespace

Polygon2D simplify_loop(const Polygon2D& loop, double tolerance) {
  const size_t n = loop.size();
  if (n < 4) return loop;
  // Anchor at two far-apart extremes, simplify the two halves.
  size_t a = 0;
  for (size_t i = 1; i < n; ++i)
    if (loop[i].x() < loop[a].x()) a = i;
  size_t b = a;
  double far = -1;
  for (size_t i = 0; i < n; ++i) {
    const double d = (loop[i] - loop[a]).norm();
    if (d > far) {
      far = d;
      b = i;
    }
  }
  Polygon2D rot(n);
  for (size_t i = 0; i < n; ++i) rot[i] = loop[(a + i) % n];
  const size_t bb = (b + n - a) % n;
  std::vector<bool> keep(n + 1, false);
  Polygon2D closed = rot;
  closed.push_back(rot[0]);
  keep[0] = keep[bb] = keep[n] = true;
  dp_simplify(closed, 0, bb, tolerance, keep);
  dp_simplify(closed, bb, n, tolerance, keep);
  Polygon2D out;
  for (size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(rot[i]);
  return out.size() >= 3 ? out : loop;
}

}  // namespace aeroprint::geom
