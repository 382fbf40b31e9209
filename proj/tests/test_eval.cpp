#include <doctest.h>

#include <random>

#include "aeroprint/app/fixtures.hpp"
#include "aeroprint/eval/evaluate.hpp"
#include "aeroprint/path/pathgen.hpp"
#include "support.hpp"

using namespace aeroprint;
using namespace aeroprint::eval;
using geom::make_box;
using geom::Vec3;

TEST_CASE("rasterize_deposition: padding arithmetic") {
  auto grid = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.2, 0.2, 0.1), 0.01);
  rasterize_deposition({}, 0.03, 0.025, grid);
  CHECK(grid.count() == 0);

  // One sample at a voxel center: 3x3 columns over ceil(l_h / voxel) slabs.
  auto one = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.2, 0.2, 0.1), 0.01);
  rasterize_deposition({{Vec3(0.105, 0.105, 0.05), true}}, 0.03, 0.025, one);
  CHECK(one.count() == 3 * 3 * 3);

  // Non-extruding samples leave no mark.
  auto off = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.2, 0.2, 0.1), 0.01);
  rasterize_deposition({{Vec3(0.105, 0.105, 0.05), false}}, 0.03, 0.025, off);
  CHECK(off.count() == 0);

  CHECK_THROWS_AS(rasterize_deposition({{Vec3(1, 1, 1), true}}, 0.03, 0.025, one),
                  OutOfBounds);
}

TEST_CASE("rasterize_deposition: sliced chunk fills roughly its own volume") {
  path::SliceConfig cfg;
  cfg.layer_height = 0.025;
  cfg.line_width = 0.03;
  const auto box = make_box(Vec3(0, 0, 0), Vec3(0.16, 0.12, 0.05));
  const auto p = path::slice_chunk(box, cfg);
  const auto stream = path::interpolate_references(p, cfg.deposition_speed,
                                                   cfg.sample_period);
  auto grid = OccupancyGrid::covering(Vec3(-0.05, -0.05, 0), Vec3(0.25, 0.25, 0.2), 0.01);
  std::vector<DepositionSample> samples;
  for (const auto& pt : stream.points) samples.push_back({pt.p, pt.extrude});
  rasterize_deposition(samples, cfg.line_width, cfg.layer_height, grid);
  const double grid_volume = static_cast<double>(grid.count()) * 0.01 * 0.01 * 0.01;
  CHECK(grid_volume == doctest::Approx(geom::mesh_volume(box)).epsilon(0.15));
}

TEST_CASE("compare_grids: identities, disjoint, shifted wall") {
  auto a = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.05), 0.01);
  rasterize_deposition({{Vec3(0.05, 0.05, 0.03), true}}, 0.03, 0.02, a);
  CHECK(compare_grids(a, a).iou == doctest::Approx(1.0));

  auto b = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.05), 0.01);
  rasterize_deposition({{Vec3(0.015, 0.015, 0.03), true}}, 0.02, 0.02, b);
  CHECK(compare_grids(a, b).iou == doctest::Approx(0.0));

  // 3 cm wall shifted laterally by 1 cm: per-section coverage 2/3.
  auto wall = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.3, 0.1, 0.05), 0.01);
  auto shifted = wall;
  std::vector<DepositionSample> w0, w1;
  for (int k = 0; k < 25; ++k) {
    w0.push_back({Vec3(0.05 + 0.008 * k, 0.045, 0.03), true});
    w1.push_back({Vec3(0.05 + 0.008 * k, 0.055, 0.03), true});
  }
  rasterize_deposition(w0, 0.03, 0.02, wall);
  rasterize_deposition(w1, 0.03, 0.02, shifted);
  CHECK(compare_grids(wall, shifted).coverage == doctest::Approx(2.0 / 3.0).epsilon(0.02));

  auto other = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.2, 0.1, 0.05), 0.01);
  CHECK_THROWS_AS(compare_grids(a, other), GridMismatch);
}

TEST_CASE("compare_grids: symmetry, bounds, monotonicity") {
  std::mt19937_64 rng(3);
  auto a = OccupancyGrid::covering(Vec3(0, 0, 0), Vec3(0.2, 0.2, 0.1), 0.01);
  auto b = a;
  std::uniform_real_distribution<double> u(0.02, 0.18);
  std::uniform_real_distribution<double> uz(0.02, 0.08);
  std::vector<DepositionSample> sa, sb;
  for (int k = 0; k < 30; ++k) {
    sa.push_back({Vec3(u(rng), u(rng), uz(rng)), true});
    sb.push_back({Vec3(u(rng), u(rng), uz(rng)), true});
  }
  rasterize_deposition(sa, 0.03, 0.02, a);
  rasterize_deposition(sb, 0.03, 0.02, b);
  const auto ab = compare_grids(a, b);
  const auto ba = compare_grids(b, a);
  CHECK(ab.iou == doctest::Approx(ba.iou).epsilon(1e-12));
  CHECK(ab.iou >= 0);
  CHECK(ab.iou <= 1);

  // Adding measured voxels inside the reference never lowers coverage.
  auto more = b;
  std::vector<DepositionSample> extra;
  for (int k = 0; k < 10; ++k) extra.push_back(sa[k]);
  rasterize_deposition(extra, 0.03, 0.02, more);
  CHECK(compare_grids(a, more).coverage >= ab.coverage - 1e-12);
}

TEST_CASE("extruder_tip: level flight and lever arm") {
  const Vec3 p(1, 2, 3);
  CHECK(extruder_tip(p, 0, 0, 0.3) == Vec3(1, 2, 2.7));
  // A 0.1 rad roll swings the tip sideways by about l_ex * sin(phi).
  const Vec3 tip = extruder_tip(p, 0.1, 0, 0.3);
  CHECK(tip.y() - p.y() == doctest::Approx(0.3 * std::sin(0.1)).epsilon(1e-9));
}

TEST_CASE("tracking_stats: constants and lever-arm amplification") {
  std::vector<TrackSample> trace;
  for (int k = 0; k < 100; ++k) {
    TrackSample s;
    s.p_ref = Vec3(0.001 * k, 0, 0.3);
    s.p = s.p_ref;
    s.extrude = true;
    s.chunk = 0;
    trace.push_back(s);
  }
  auto stats = tracking_stats(trace, 0.3);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].uav_mean_3d == doctest::Approx(0));
  CHECK(stats[0].tip_mean_3d == doctest::Approx(0));

  // Constant 2 cm planar offset.
  for (auto& s : trace) s.p = s.p_ref + Vec3(0.02, 0, 0);
  stats = tracking_stats(trace, 0.3);
  CHECK(stats[0].uav_mean_planar == doctest::Approx(0.02));
  CHECK(stats[0].uav_max_planar == doctest::Approx(0.02));

  // Perfect position, oscillating roll: only the tip sees error.
  for (int k = 0; k < 100; ++k) {
    trace[k].p = trace[k].p_ref;
    trace[k].phi = 0.05 * std::sin(0.3 * k);
  }
  stats = tracking_stats(trace, 0.3);
  CHECK(stats[0].tip_mean_3d > stats[0].uav_mean_3d);
  CHECK_THROWS_AS(tracking_stats({}, 0.3), EmptyTrace);
}

TEST_CASE("voxelize_mesh: counts approximate the volume") {
  const auto box = make_box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.05));
  auto grid = OccupancyGrid::covering(Vec3(-0.02, -0.02, 0), Vec3(0.12, 0.12, 0.07), 0.01);
  voxelize_mesh(box, grid);
  CHECK(static_cast<double>(grid.count()) * 1e-6 ==
        doctest::Approx(5e-4).epsilon(0.05));
}
