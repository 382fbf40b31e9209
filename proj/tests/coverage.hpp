// Voxel coverage/containment oracle shared by the slicing tests and the
// acceptance suite.
#pragma once

#include "aeroprint/eval/evaluate.hpp"
#include "aeroprint/path/pathgen.hpp"

namespace testsupport {

struct CoverageReport {
  double coverage = 0;   // chunk voxels hit by the padded path
  bool contained = false;  // padded path within one dilated voxel
  std::size_t chunk_voxels = 0;
};

inline CoverageReport coverage_report(const aeroprint::geom::TriangleMesh& chunk,
                                      const aeroprint::path::ManufacturingPath& path,
                                      double line_width, double layer_height,
                                      double voxel = 0.01) {
  using namespace aeroprint;
  geom::Vec3 lo, hi;
  geom::mesh_bounds(chunk, lo, hi);
  const geom::Vec3 margin(0.05, 0.05, 0.05);
  auto chunk_grid = eval::OccupancyGrid::covering(lo - margin, hi + margin, voxel);
  auto path_grid = chunk_grid;
  eval::voxelize_mesh(chunk, chunk_grid);

  // Densify extruding segments well under the voxel size.
  std::vector<eval::DepositionSample> samples;
  for (const auto& s : path.segments) {
    if (!s.extrude) continue;
    const double len = (s.b - s.a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / (voxel / 4))));
    for (int k = 0; k <= n; ++k)
      samples.push_back({s.a + (s.b - s.a) * (static_cast<double>(k) / n), true});
  }
  eval::rasterize_deposition(samples, line_width, layer_height, path_grid);

  const auto dilated = eval::dilate(chunk_grid);
  std::size_t inter = 0, path_outside = 0, chunk_count = 0;
  for (std::size_t w = 0; w < chunk_grid.bits.size(); ++w) {
    inter += static_cast<std::size_t>(
        __builtin_popcountll(chunk_grid.bits[w] & path_grid.bits[w]));
    path_outside += static_cast<std::size_t>(
        __builtin_popcountll(path_grid.bits[w] & ~dilated.bits[w]));
    chunk_count += static_cast<std::size_t>(__builtin_popcountll(chunk_grid.bits[w]));
  }
  CoverageReport r;
  r.chunk_voxels = chunk_count;
  r.coverage = chunk_count ? static_cast<double>(inter) / chunk_count : 0.0;
  r.contained = path_outside == 0;
  return r;
}

}  // namespace testsupport
