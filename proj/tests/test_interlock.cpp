#include <doctest.h>

#include <random>

#include "aeroprint/geom/merge.hpp"
#include "aeroprint/geom/split.hpp"
#include "aeroprint/interlock/interlock.hpp"
#include "support.hpp"

using namespace aeroprint;
using namespace aeroprint::interlock;
using chunker::Chunk;
using chunker::make_chunk;
using geom::make_box;
using geom::make_plane;
using geom::TriangleMesh;
using geom::Vec3;

namespace {

double surface_area(const TriangleMesh& m) {
  double a = 0;
  for (size_t f = 0; f < m.faces.size(); ++f) a += m.face_area(static_cast<int>(f));
  return a;
}

// Shared interface area of two touching solids.
double interface_area(const TriangleMesh& a, const TriangleMesh& b) {
  const TriangleMesh merged = geom::merge_cells({a, b});
  return (surface_area(a) + surface_area(b) - surface_area(merged)) / 2.0;
}

struct Pair {
  std::shared_ptr<const Chunk> bottom, top;
  geom::CutPlane plane;
};

Pair inclined_pair(const Vec3& normal, const Vec3& origin, const Vec3& size) {
  const auto box = make_box(Vec3(0, 0, 0), size);
  const auto plane = make_plane(normal, origin, 0);
  auto r = geom::split_mesh(box, plane);
  Pair p;
  p.bottom = make_chunk(r.negative, {{plane, -1}});
  p.top = make_chunk(r.positive, {{plane, +1}});
  p.plane = plane;
  return p;
}

}  // namespace

TEST_CASE("contact_pairs: horizontal split has none, inclined split has one") {
  const auto box = make_box(Vec3(0, 0, 0), Vec3(0.3, 0.3, 0.3));

  const auto hplane = make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.15), 0);
  auto hr = geom::split_mesh(box, hplane);
  std::vector<std::shared_ptr<const Chunk>> hchunks{
      make_chunk(hr.negative, {{hplane, -1}}), make_chunk(hr.positive, {{hplane, +1}})};
  auto hg = plan::build_graph(hchunks);
  REQUIRE(hg.edges.size() == 1);
  CHECK(contact_pairs(hchunks, hg).empty());

  const auto iplane = make_plane(Vec3(std::sin(M_PI / 6), 0, std::cos(M_PI / 6)),
                                 Vec3(0.15, 0.15, 0.15), 1);
  auto ir = geom::split_mesh(box, iplane);
  std::vector<std::shared_ptr<const Chunk>> ichunks{
      make_chunk(ir.negative, {{iplane, -1}}), make_chunk(ir.positive, {{iplane, +1}})};
  auto ig = plan::build_graph(ichunks);
  REQUIRE(ig.edges.size() == 1);
  const auto pairs = contact_pairs(ichunks, ig);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].bottom_id == 0);
  CHECK(pairs[0].top_id == 1);
}

TEST_CASE("interlock_pair: two-layer interface forms one step") {
  // 30 deg from vertical in x, interface spans the full 0.05 m height with
  // layer height 0.025: exactly one interior layer plane.
  const double lh = 0.025;
  const auto p = inclined_pair(Vec3(1, 0, 0.5).normalized(), Vec3(0.1, 0, 0.025),
                               Vec3(0.2, 0.1, 0.05));
  int next_id = 100;
  const auto [nb, nt] = interlock_pair(p.bottom->mesh, p.top->mesh, p.plane, lh, next_id);

  CHECK(geom::is_closed(nb));
  CHECK(geom::is_closed(nt));
  const double v_in = geom::mesh_volume(p.bottom->mesh) + geom::mesh_volume(p.top->mesh);
  CHECK(geom::mesh_volume(nb) + geom::mesh_volume(nt) ==
        doctest::Approx(v_in).epsilon(1e-9));

  // Bottom gained the slivers, top lost them.
  CHECK(geom::mesh_volume(nb) > geom::mesh_volume(p.bottom->mesh));
  CHECK(geom::mesh_volume(nt) < geom::mesh_volume(p.top->mesh));

  // Staircase interface area strictly exceeds the inclined one.
  const double before = interface_area(p.bottom->mesh, p.top->mesh);
  const double after = interface_area(nb, nt);
  CHECK(after > before * 1.01);

  // One interior plane: exactly one tread strip at z = 0.025 shared by the
  // two chunks, plus risers on the two synthesized vertical planes.
  const auto cb = make_chunk(nb, {});
  const auto ct = make_chunk(nt, {});
  double tread = 0;
  for (const auto& fu : plan::cut_faces(*ct)) {
    if (fu.side <= 0 || !fu.plane_normal.isApprox(Vec3::UnitZ(), 1e-9)) continue;
    for (const auto& fl : plan::cut_faces(*cb)) {
      if (fl.side >= 0 || !fl.plane_normal.isApprox(Vec3::UnitZ(), 1e-9)) continue;
      if (std::abs(fu.plane_offset - fl.plane_offset) > geom::tol::kCoplanar) continue;
      tread += geom::face_polygon_overlap(ct->mesh, fu.triangles, cb->mesh, fl.triangles);
    }
  }
  // Horizontal run per layer: lh * n_z / n_h = 0.025 * 0.5 = 0.0125, 0.1 deep.
  CHECK(tread == doctest::Approx(0.0125 * 0.1).epsilon(1e-6));
}

TEST_CASE("interlock_pair: horizontal interface is the identity") {
  const auto box = make_box(Vec3(0, 0, 0), Vec3(0.2, 0.2, 0.2));
  const auto plane = make_plane(Vec3(0, 0, 1), Vec3(0, 0, 0.1), 0);
  auto r = geom::split_mesh(box, plane);
  int next_id = 100;
  const auto [nb, nt] = interlock_pair(r.negative, r.positive, plane, 0.025, next_id);
  CHECK(geom::mesh_volume(nb) == doctest::Approx(geom::mesh_volume(r.negative)));
  CHECK(geom::mesh_volume(nt) == doctest::Approx(geom::mesh_volume(r.positive)));
}

TEST_CASE("interlock_pair: interface shorter than one layer is degenerate") {
  const auto p = inclined_pair(Vec3(1, 0, 0.2).normalized(), Vec3(0.1, 0, 0.01),
                               Vec3(0.2, 0.1, 0.02));
  int next_id = 100;
  CHECK_THROWS_AS(
      interlock_pair(p.bottom->mesh, p.top->mesh, p.plane, 0.5, next_id),
      DegenerateInterface);
}

TEST_CASE("interlock_all: dependency edges unchanged, chained pairs conserve") {
  // Box cut by two parallel inclined planes: A-B and B-C contacts.
  const auto box = make_box(Vec3(0, 0, 0), Vec3(0.4, 0.1, 0.1));
  const auto p1 = make_plane(Vec3(1, 0, 0.6).normalized(), Vec3(0.13, 0, 0.05), 0);
  const auto p2 = make_plane(Vec3(1, 0, 0.6).normalized(), Vec3(0.27, 0, 0.05), 1);
  auto r1 = geom::split_mesh(box, p1);
  auto r2 = geom::split_mesh(r1.positive, p2);
  std::vector<std::shared_ptr<const Chunk>> chunks{
      make_chunk(r1.negative, {{p1, -1}}),
      make_chunk(r2.negative, {{p1, +1}, {p2, -1}}),
      make_chunk(r2.positive, {{p1, +1}, {p2, +1}})};
  for (size_t k = 0; k < chunks.size(); ++k)
    const_cast<Chunk&>(*chunks[k]).id = static_cast<int>(k);

  const auto graph = plan::build_graph(chunks);
  REQUIRE(contact_pairs(chunks, graph).size() == 2);

  const double v_in = chunks[0]->volume_l + chunks[1]->volume_l + chunks[2]->volume_l;
  const auto updated = interlock_all(chunks, graph, 0.025);
  const double v_out = updated[0]->volume_l + updated[1]->volume_l + updated[2]->volume_l;
  CHECK(v_out == doctest::Approx(v_in).epsilon(1e-9));
  for (const auto& c : updated) CHECK(geom::is_closed(c->mesh));

  auto edges_before = graph.edges;
  auto after = plan::build_graph(updated);
  std::sort(edges_before.begin(), edges_before.end());
  std::sort(after.edges.begin(), after.edges.end());
  CHECK(edges_before == after.edges);
}

TEST_CASE("interlock_pair: randomized inclined pairs conserve and grow contact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uphi(0.15, M_PI / 4);
  std::uniform_real_distribution<double> utheta(-M_PI, M_PI);
  std::uniform_real_distribution<double> uoff(0.08, 0.12);
  int done = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const double phi = uphi(rng), theta = utheta(rng);
    const Vec3 n(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                 std::cos(phi));
    try {
      const auto p = inclined_pair(n, Vec3(uoff(rng), uoff(rng), 0.1),
                                   Vec3(0.2, 0.2, 0.2));
      int next_id = 100;
      const auto [nb, nt] =
          interlock_pair(p.bottom->mesh, p.top->mesh, p.plane, 0.045, next_id);
      const double v_in =
          geom::mesh_volume(p.bottom->mesh) + geom::mesh_volume(p.top->mesh);
      CHECK(geom::mesh_volume(nb) + geom::mesh_volume(nt) ==
            doctest::Approx(v_in).epsilon(1e-6));
      CHECK(interface_area(nb, nt) >=
            interface_area(p.bottom->mesh, p.top->mesh) - 1e-9);
      ++done;
    } catch (const DegenerateCut&) {
    } catch (const DegenerateInterface&) {
    }
  }
  CHECK(done >= 8);
}
