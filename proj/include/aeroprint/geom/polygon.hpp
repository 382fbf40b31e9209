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

// Ordered 2D loop in a plane's local frame.
using Polygon2D = std::vector<Vec2>;

double signed_area(const Polygon2D& poly);
bool point_in_polygon(const Vec2& p, const Polygon2D& poly);

// Even-odd containment against a set of loops (outer + holes in one plane).
bool point_in_loops(const Vec2& p, const std::vector<Polygon2D>& loops);

// Orthonormal in-plane basis (u, v) with u x v = normal.
void plane_basis(const Vec3& normal, Vec3& u, Vec3& v);

// Convex clipping (Sutherland-Hodgman). `clip` must be convex and CCW.
Polygon2D clip_convex(const Polygon2D& subject, const Polygon2D& clip);

// Area of triangle-triangle intersection; orientation-insensitive.
double tri_tri_overlap_area(const Vec2& a0, const Vec2& a1, const Vec2& a2,
                            const Vec2& b0, const Vec2& b1, const Vec2& b2);

// Intersection area of the faces `fa` of mesh `a` and `fb` of mesh `b`,
// projected onto their common plane. Both faces must be coplanar within
// tol::kCoplanar (and parallel within tol::kParallel) or NotCoplanar is
// thrown. Faces are given as triangle index lists.
double face_polygon_overlap(const TriangleMesh& a, const std::vector<int>& fa,
                            const TriangleMesh& b, const std::vector<int>& fb);

// Ear-clipping triangulation of one outer loop (CCW) with holes (CW).
// Emits index triples into the concatenated vertex list [outer, holes...].
// Collinear runs are kept (degenerate ears are emitted) so boundary edges
// stay watertight against adjacent geometry.
struct LoopGroup {
  Polygon2D outer;
  std::vector<Polygon2D> holes;
};
std::vector<std::array<int, 3>> triangulate_group(const LoopGroup& group);

// Splits a set of closed loops into nesting groups (outer at even depth,
// holes at odd depth) and normalizes orientations (outer CCW, holes CW).
std::vector<LoopGroup> group_loops(std::vector<Polygon2D> loops);

// Perpendicular distance simplification that never moves a point by more
// than `tolerance`.
Polygon2D simplify_loop(const Polygon2D& loop, double tolerance);

}  // namespace aeroprint::geom
