#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "aeroprint/app/fixtures.hpp"
#include "aeroprint/geom/core.hpp"
#include "aeroprint/geom/obb.hpp"
#include "aeroprint/geom/polygon.hpp"
#include "aeroprint/geom/split.hpp"
#include "aeroprint/geom/stl.hpp"
#include "support.hpp"

using namespace aeroprint;
using namespace aeroprint::geom;
using testsupport::quad_mesh;
using testsupport::random_cut_box;
using testsupport::random_plane_through;

TEST_CASE("mesh_volume: unit cube and fixtures") {
  const TriangleMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  CHECK(mesh_volume(cube) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_closed(cube));

  const TriangleMesh rect = app::rectangle_fixture();
  CHECK(is_closed(rect));
  // 0.55^2 * 0.08 - 0.20^2 * 0.08
  CHECK(mesh_volume(rect) == doctest::Approx(0.0210).epsilon(1e-9));

  const TriangleMesh hex = app::hexagon_fixture();
  CHECK(is_closed(hex));
  CHECK(mesh_volume_liters(hex) == doctest::Approx(18.93).epsilon(0.01));
}

TEST_CASE("split_mesh: unit cube by z=0.5") {
  const TriangleMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  const auto r = split_mesh(cube, make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.5)));
  CHECK(mesh_volume(r.negative) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mesh_volume(r.positive) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(is_closed(r.negative));
  CHECK(is_closed(r.positive));
  // Negative half is below the plane.
  Vec3 lo, hi;
  mesh_bounds(r.negative, lo, hi);
  CHECK(hi.z() == doctest::Approx(0.5));
}

TEST_CASE("split_mesh: plane missing the mesh") {
  const TriangleMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  const auto r = split_mesh(cube, make_plane(Vec3(0, 0, 1), Vec3(0, 0, 2)));
  CHECK(r.positive.empty());
  CHECK(mesh_volume(r.negative) == doctest::Approx(1.0));
}

TEST_CASE("split_mesh: rectangle fixture ground cut at z=0.04") {
  const TriangleMesh rect = app::rectangle_fixture();
  const auto r = split_mesh(rect, make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.04)));
  // Analytic prisms: (0.55^2 - 0.2^2) * 0.04 each.
  const double expected = (0.55 * 0.55 - 0.2 * 0.2) * 0.04;
  CHECK(mesh_volume(r.negative) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(mesh_volume(r.positive) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(is_closed(r.negative));
  CHECK(is_closed(r.positive));
}

TEST_CASE("split_mesh: cap provenance recorded on both sides") {
  const TriangleMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  const CutPlane plane = make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.25), 7);
  const auto r = split_mesh(cube, plane);
  int neg_caps = 0, pos_caps = 0;
  for (const auto& t : r.negative.tags)
    if (t.from_cut && t.plane_id == 7 && t.side == -1) ++neg_caps;
  for (const auto& t : r.positive.tags)
    if (t.from_cut && t.plane_id == 7 && t.side == +1) ++pos_caps;
  CHECK(neg_caps >= 2);
  CHECK(pos_caps >= 2);
}

TEST_CASE("split_mesh: volume conservation on random planes") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const TriangleMesh m = trial % 2 == 0
                               ? app::rectangle_fixture()
                               : make_box(Vec3(0, 0, 0), Vec3(0.4, 0.3, 0.2));
    const double v0 = mesh_volume(m);
    try {
      const auto r = split_mesh(m, random_plane_through(m, rng));
      const double vn = mesh_volume(r.negative);
      const double vp = mesh_volume(r.positive);
      CHECK(vn + vp == doctest::Approx(v0).epsilon(1e-6));
      if (!r.negative.empty()) CHECK(is_closed(r.negative));
      if (!r.positive.empty()) CHECK(is_closed(r.positive));
    } catch (const DegenerateCut&) {
      // Grazing cut: acceptable outcome for random planes.
    }
  }
}

TEST_CASE("split_mesh: re-splitting by the same plane is idempotent") {
  const TriangleMesh cube = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
  const CutPlane plane = make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.5));
  const auto first = split_mesh(cube, plane);
  const auto again = split_mesh(first.positive, plane);
  CHECK(again.negative.empty());
  CHECK(mesh_volume(again.positive) ==
        doctest::Approx(mesh_volume(first.positive)).epsilon(1e-12));
}

TEST_CASE("split_mesh: rejects open input") {
  TriangleMesh open;
  open.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  open.add_face(0, 1, 2);
  CHECK_THROWS_AS(split_mesh(open, make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0))),
                  NonManifoldInput);
}

TEST_CASE("plane_distance") {
  const CutPlane a = make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0));
  CHECK(plane_distance(a, a) == doctest::Approx(0));
  const CutPlane b = make_plane(Vec3(0, 0, 1), Vec3(5, -2, 0.025));
  CHECK(plane_distance(a, b) == doctest::Approx(0.025));
  // Oblique origins, same normal: |(o_a - o_b) . n|.
  const CutPlane c = make_plane(Vec3(0, 0, 1), Vec3(1, 1, 1));
  CHECK(plane_distance(a, c) == doctest::Approx(1.0));
  const CutPlane d = make_plane(Vec3(1, 0, 0), Vec3(0, 0, 0));
  CHECK_THROWS_AS(plane_distance(a, d), NotParallel);
}

TEST_CASE("face_polygon_overlap: squares") {
  const auto square = [](double ox, double oy) {
    return quad_mesh(Vec3(ox, oy, 0), Vec3(ox + 1, oy, 0), Vec3(ox + 1, oy + 1, 0),
                     Vec3(ox, oy + 1, 0));
  };
  const TriangleMesh a = square(0, 0);
  const std::vector<int> all{0, 1};
  CHECK(face_polygon_overlap(a, all, square(0, 0), all) == doctest::Approx(1.0));
  CHECK(face_polygon_overlap(a, all, square(2, 0), all) == doctest::Approx(0.0));
  CHECK(face_polygon_overlap(a, all, square(0.5, 0), all) == doctest::Approx(0.5));
  // Symmetry on a skewed pair.
  const TriangleMesh b = square(0.3, -0.4);
  CHECK(face_polygon_overlap(a, all, b, all) ==
        doctest::Approx(face_polygon_overlap(b, all, a, all)).epsilon(1e-9));
  // Coplanarity enforced.
  const TriangleMesh high = quad_mesh(Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1),
                                      Vec3(0, 1, 1));
  CHECK_THROWS_AS(face_polygon_overlap(a, all, high, all), NotCoplanar);
}

TEST_CASE("compute_obb: boxes and degenerate sheet") {
  const TriangleMesh box = make_box(Vec3(-1, -2, -3), Vec3(1, 2, 3));
  const auto obb = compute_obb(box);
  Vec3 e = obb.extents;
  std::sort(e.data(), e.data() + 3);
  CHECK(e.x() == doctest::Approx(1).epsilon(1e-6));
  CHECK(e.y() == doctest::Approx(2).epsilon(1e-6));
  CHECK(e.z() == doctest::Approx(3).epsilon(1e-6));

  const auto rot = compute_obb(rotated_z(box, M_PI / 6));
  Vec3 er = rot.extents;
  std::sort(er.data(), er.data() + 3);
  CHECK(er.x() == doctest::Approx(1).epsilon(1e-6));
  CHECK(er.z() == doctest::Approx(3).epsilon(1e-6));

  const TriangleMesh sheet = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1e-9));
  CHECK(compute_obb(sheet).min_extent() == doctest::Approx(0).epsilon(1e-6));
  CHECK_THROWS_AS(compute_obb(TriangleMesh{}), EmptyMesh);
}

TEST_CASE("compute_obb: containment on randomized cut meshes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const TriangleMesh m = random_cut_box(rng);
    const auto obb = compute_obb(m);
    for (const auto& v : m.vertices) CHECK(obb.contains(v));
  }
}

TEST_CASE("stl: binary and ascii round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "aeroprint_stl_test";
  fs::create_directories(dir);
  const TriangleMesh rect = app::rectangle_fixture();

  const auto check_roundtrip = [&](bool binary) {
    const std::string path = (dir / (binary ? "m.stl" : "m_ascii.stl")).string();
    write_stl(path, rect, {1.0, binary});
    const TriangleMesh back = read_stl(path);
    CHECK(back.faces.size() == rect.faces.size());
    CHECK(mesh_volume(back) == doctest::Approx(mesh_volume(rect)).epsilon(1e-5));
    CHECK(is_closed(back));
  };
  check_roundtrip(true);
  check_roundtrip(false);

  CHECK_THROWS_AS(read_stl((dir / "missing.stl").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("extrude_polygon: ring with hole is closed and exact") {
  std::vector<std::vector<Vec2>> loops;
  loops.push_back({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  loops.push_back({{0.5, 0.5}, {0.5, 1.5}, {1.5, 1.5}, {1.5, 0.5}});
  const TriangleMesh m = extrude_polygon(loops, 0.5);
  CHECK(is_closed(m));
  CHECK(mesh_volume(m) == doctest::Approx((4.0 - 1.0) * 0.5).epsilon(1e-12));
}
