// Shared helpers for the test suites.
#pragma once

#include <random>

#include "aeroprint/geom/core.hpp"
#include "aeroprint/geom/split.hpp"

namespace testsupport {

using aeroprint::geom::CutPlane;
using aeroprint::geom::TriangleMesh;
using aeroprint::geom::Vec3;

inline Vec3 random_unit_upward(std::mt19937_64& rng, double phi_max = 1.2) {
  std::uniform_real_distribution<double> uz(std::cos(phi_max), 1.0);
  std::uniform_real_distribution<double> ut(-M_PI, M_PI);
  const double z = uz(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double t = ut(rng);
  return {r * std::cos(t), r * std::sin(t), z};
}

inline CutPlane random_plane_through(const TriangleMesh& mesh, std::mt19937_64& rng) {
  Vec3 lo, hi;
  aeroprint::geom::mesh_bounds(mesh, lo, hi);
  const Vec3 n = random_unit_upward(rng);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  const Vec3 p = lo + Vec3((hi - lo).x() * u(rng), (hi - lo).y() * u(rng),
                           (hi - lo).z() * u(rng));
  return aeroprint::geom::make_plane(n, p);
}

// A few random plane splits of a box, keeping one side each time: yields
// closed meshes with capped faces and provenance.
inline TriangleMesh random_cut_box(std::mt19937_64& rng, int cuts = 2) {
  TriangleMesh m = aeroprint::geom::make_box(Vec3(0, 0, 0), Vec3(1, 0.8, 0.6));
  for (int i = 0; i < cuts; ++i) {
    try {
      auto r = aeroprint::geom::split_mesh(m, random_plane_through(m, rng));
      std::bernoulli_distribution pick(0.5);
      TriangleMesh side = pick(rng) ? r.positive : r.negative;
      if (!side.empty()) m = side;
    } catch (const aeroprint::DegenerateCut&) {
    }
  }
  return m;
}

// Planar face as a 2-triangle quad mesh, for overlap tests.
inline TriangleMesh quad_mesh(const Vec3& a, const Vec3& b, const Vec3& c,
                              const Vec3& d) {
  TriangleMesh m;
  m.vertices = {a, b, c, d};
  m.add_face(0, 1, 2);
  m.add_face(0, 2, 3);
  return m;
}

}  // namespace testsupport
