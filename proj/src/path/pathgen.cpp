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

#include "aeroprint/path/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "aeroprint/geom/split.hpp"

namespace aeroprint::path {

using geom::Polygon2D;
using geom::Vec2;

void SliceConfig::validate() const {
  if (!(layer_height > 0) || !(line_width > 0) || !(deposition_speed > 0) ||
      !(extruder_offset >= 0) || !(sample_period > 0) || !(sdf_cell > 0))
    throw Error("slice config: all parameters must be positive");
}

double ManufacturingPath::total_length() const {
  double len = 0;
  for (const auto& s : segments) len += (s.b - s.a).norm();
  return len;
}

double ManufacturingPath::extrusion_length() const {
  double len = 0;
  for (const auto& s : segments)
    if (s.extrude) len += (s.b - s.a).norm();
  return len;
}

namespace {

// Inside-distance raster of a polygonal region (outer CCW, holes CW).
struct Raster {
  double ox = 0, oy = 0, cell = 0;
  int nx = 0, ny = 0;
  std::vector<float> depth;  // [m]; negative outside
  std::vector<int> comp;     // -1 outside
  int n_comp = 0;

  float at(int i, int j) const { return depth[j * nx + i]; }
  int comp_at(int i, int j) const { return comp[j * nx + i]; }
  double x(int i) const { return ox + i * cell; }
  double y(int j) const { return oy + j * cell; }
};

// 1D squared distance transform (lower envelope of parabolas).
void edt_pass(const std::vector<float>& f, std::vector<float>& d, int n) {
  static thread_local std::vector<int> v;
  static thread_local std::vector<float> z;
  v.assign(n, 0);
  z.assign(n + 1, 0);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<float>::infinity();
  z[1] = std::numeric_limits<float>::infinity();
  for (int q = 1; q < n; ++q) {
    float s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0f * (q - v[k]));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<float>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

Raster rasterize(const std::vector<Polygon2D>& loops, double cell) {
  Raster r;
  r.cell = cell;
  double minx = std::numeric_limits<double>::infinity(), maxx = -minx;
  double miny = minx, maxy = -minx;
  for (const auto& loop : loops)
    for (const auto& p : loop) {
      minx = std::min(minx, p.x());
      maxx = std::max(maxx, p.x());
      miny = std::min(miny, p.y());
      maxy = std::max(maxy, p.y());
    }
  r.ox = minx - 3 * cell;
  r.oy = miny - 3 * cell;
  r.nx = static_cast<int>(std::ceil((maxx - r.ox) / cell)) + 4;
  r.ny = static_cast<int>(std::ceil((maxy - r.oy) / cell)) + 4;

  std::vector<char> inside(static_cast<size_t>(r.nx) * r.ny, 0);
  std::vector<double> xs;
  for (int j = 0; j < r.ny; ++j) {
    const double y = r.y(j);
    xs.clear();
    for (const auto& loop : loops) {
      const size_t n = loop.size();
      for (size_t e = 0; e < n; ++e) {
        const Vec2& a = loop[e];
        const Vec2& b = loop[(e + 1) % n];
        if ((a.y() > y) == (b.y() > y)) continue;
        xs.push_back(a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - r.ox) / cell)));
      const int i1 = std::min(r.nx - 1,
                              static_cast<int>(std::floor((xs[k + 1] - r.ox) / cell)));
      for (int i = i0; i <= i1; ++i) inside[j * r.nx + i] = 1;
    }
  }

  // Squared distance (pixel units) to the nearest outside node.
  const float inf = 1e30f;
  std::vector<float> d2(inside.size());
  for (size_t i = 0; i < inside.size(); ++i) d2[i] = inside[i] ? inf : 0.0f;
  std::vector<float> col(r.ny), out_col(r.ny), row(r.nx), out_row(r.nx);
  for (int i = 0; i < r.nx; ++i) {
    for (int j = 0; j < r.ny; ++j) col[j] = d2[j * r.nx + i];
    edt_pass(col, out_col, r.ny);
    for (int j = 0; j < r.ny; ++j) d2[j * r.nx + i] = out_col[j];
  }
  for (int j = 0; j < r.ny; ++j) {
    for (int i = 0; i < r.nx; ++i) row[i] = d2[j * r.nx + i];
    edt_pass(row, out_row, r.nx);
    for (int i = 0; i < r.nx; ++i) d2[j * r.nx + i] = out_row[i];
  }
  r.depth.resize(inside.size());
  for (size_t i = 0; i < inside.size(); ++i) {
    r.depth[i] = inside[i]
                     ? static_cast<float>((std::sqrt(static_cast<double>(d2[i])) - 0.5) * cell)
                     : static_cast<float>(-cell);
    if (inside[i] && r.depth[i] < 0.1f * cell) r.depth[i] = static_cast<float>(0.1 * cell);
  }

  // Connected components (4-neighborhood) of the inside mask.
  r.comp.assign(inside.size(), -1);
  for (int j = 0; j < r.ny; ++j) {
    for (int i = 0; i < r.nx; ++i) {
      if (!inside[j * r.nx + i] || r.comp[j * r.nx + i] >= 0) continue;
      std::queue<std::pair<int, int>> bfs;
      bfs.push({i, j});
      r.comp[j * r.nx + i] = r.n_comp;
      while (!bfs.empty()) {
        auto [ci, cj] = bfs.front();
        bfs.pop();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int ni = ci + di[k], nj = cj + dj[k];
          if (ni < 0 || nj < 0 || ni >= r.nx || nj >= r.ny) continue;
          if (!inside[nj * r.nx + ni] || r.comp[nj * r.nx + ni] >= 0) continue;
          r.comp[nj * r.nx + ni] = r.n_comp;
          bfs.push({ni, nj});
        }
      }
      ++r.n_comp;
    }
  }
  return r;
}

// Marching squares at `depth == level`, restricted to one component (-1 =
// all). Loops come out CCW around the deeper region.
std::vector<Polygon2D> contours(const Raster& r, double level, int want_comp) {
  const auto field = [&](int i, int j) {
    return static_cast<double>(r.at(i, j)) - level;
  };
  const auto inside = [&](int i, int j) {
    if (field(i, j) < 0) return false;
    return want_comp < 0 || r.comp_at(i, j) == want_comp;
  };
  // Edge ids: horizontal (i,j)-(i+1,j) -> 2*(j*nx+i), vertical +1.
  const auto hedge = [&](int i, int j) { return 2 * (j * r.nx + i); };
  const auto vedge = [&](int i, int j) { return 2 * (j * r.nx + i) + 1; };
  const auto edge_point = [&](int id) {
    const bool vertical = id & 1;
    const int lin = id >> 1;
    const int i = lin % r.nx, j = lin / r.nx;
    const double fa = field(i, j);
    const double fb = vertical ? field(i, j + 1) : field(i + 1, j);
    const double t = fa / (fa - fb);
    return vertical ? Vec2(r.x(i), r.y(j) + t * r.cell)
                    : Vec2(r.x(i) + t * r.cell, r.y(j));
  };

  std::map<int, int> next_of;  // from-edge -> to-edge
  const auto add = [&](int from, int to) { next_of[from] = to; };
  for (int j = 0; j + 1 < r.ny; ++j) {
    for (int i = 0; i + 1 < r.nx; ++i) {
      const int c = (inside(i, j) ? 1 : 0) | (inside(i + 1, j) ? 2 : 0) |
                    (inside(i + 1, j + 1) ? 4 : 0) | (inside(i, j + 1) ? 8 : 0);
      const int e0 = hedge(i, j), e1 = vedge(i + 1, j), e2 = hedge(i, j + 1),
                e3 = vedge(i, j);
      switch (c) {
        case 1: add(e0, e3); break;
        case 2: add(e1, e0); break;
        case 3: add(e1, e3); break;
        case 4: add(e2, e1); break;
        case 6: add(e2, e0); break;
        case 7: add(e2, e3); break;
        case 8: add(e3, e2); break;
        case 9: add(e0, e2); break;
        case 11: add(e1, e2); break;
        case 12: add(e3, e1); break;
        case 13: add(e0, e1); break;
        case 14: add(e3, e0); break;
        case 5: {
          const bool center = field(i, j) + field(i + 1, j) + field(i + 1, j + 1) +
                                  field(i, j + 1) >=
                              0;
          if (center) {
            add(e0, e1);
            add(e2, e3);
          } else {
            add(e0, e3);
            add(e2, e1);
          }
          break;
        }
        case 10: {
          const bool center = field(i, j) + field(i + 1, j) + field(i + 1, j + 1) +
                                  field(i, j + 1) >=
                              0;
          if (center) {
            add(e3, e0);
            add(e1, e2);
          } else {
            add(e1, e0);
            add(e3, e2);
          }
          break;
        }
        default: break;
      }
    }
  }

  std::vector<Polygon2D> loops;
  std::map<int, bool> used;
  for (const auto& [start, first] : next_of) {
    if (used[start]) continue;
    Polygon2D loop;
    int cur = start;
    while (true) {
      used[cur] = true;
      loop.push_back(edge_point(cur));
      auto it = next_of.find(cur);
      if (it == next_of.end()) {
        loop.clear();
        break;
      }
      cur = it->second;
      if (cur == start) break;
      if (used[cur]) {
        loop.clear();
        break;
      }
    }
    if (loop.size() >= 3) {
      Polygon2D simplified = geom::simplify_loop(loop, r.cell * 0.6);
      if (simplified.size() >= 3) loops.push_back(std::move(simplified));
    }
  }
  return loops;
}

void sort_loops(std::vector<Polygon2D>& loops) {
  const auto key = [](const Polygon2D& l) {
    Vec2 m = l[0];
    for (const auto& p : l)
      if (p.x() < m.x() || (p.x() == m.x() && p.y() < m.y())) m = p;
    return std::make_pair(m.x(), m.y());
  };
  std::stable_sort(loops.begin(), loops.end(),
                   [&](const Polygon2D& a, const Polygon2D& b) { return key(a) < key(b); });
}

}  // namespace

LayerLoops concentric_loops(const std::vector<Polygon2D>& region, double line_width,
                            double cell) {
  LayerLoops out;
  if (region.empty()) return out;
  const Raster raster = rasterize(region, cell);

  struct CompInfo {
    double max_depth = 0;
    double area = 0;
    int first_node = std::numeric_limits<int>::max();
  };
  std::vector<CompInfo> comps(raster.n_comp);
  for (int j = 0; j < raster.ny; ++j) {
    for (int i = 0; i < raster.nx; ++i) {
      const int c = raster.comp_at(i, j);
      if (c < 0) continue;
      comps[c].max_depth = std::max(comps[c].max_depth,
                                    static_cast<double>(raster.at(i, j)));
      comps[c].area += cell * cell;
      comps[c].first_node = std::min(comps[c].first_node, j * raster.nx + i);
    }
  }
  std::vector<int> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return comps[a].first_node < comps[b].first_node;
  });

  const double dust = line_width * line_width;
  for (int c : order) {
    const auto& info = comps[c];
    if (info.area <= dust) continue;  // numeric crumbs
    if (2 * info.max_depth < line_width)
      throw Unsliceable("concentric_loops: region thinner than one line width");
    int k = 0;
    for (;; ++k) {
      const double level = line_width / 2 + k * line_width;
      if (level > info.max_depth) break;
      auto rings = contours(raster, level, c);
      if (rings.empty()) break;
      sort_loops(rings);
      for (auto& r : rings) out.rings.push_back(std::move(r));
    }
    // Leftover ridge between the innermost ring's coverage and the medial
    // axis: one centerline pass unless negligible.
    const double covered = k * line_width;
    const double resid = 2 * (info.max_depth - covered);
    if (resid > std::max(2 * cell, 0.05 * line_width)) {
      // A quarter into the residual band: central enough to cover it, low
      // enough that the ridge stays connected on the raster.
      const double level = std::min(covered + resid / 4, info.max_depth - 2 * cell);
      auto ridge = contours(raster, std::max(level, cell), c);
      // The ridge comes out as a thin band; its CCW side is the single pass.
      ridge.erase(std::remove_if(ridge.begin(), ridge.end(),
                                 [](const Polygon2D& l) { return geom::signed_area(l) <= 0; }),
                  ridge.end());
      sort_loops(ridge);
      for (auto& r : ridge) out.centerline.push_back(std::move(r));
    }
  }
  return out;
}

ManufacturingPath slice_chunk(const TriangleMesh& chunk, const SliceConfig& cfg) {
  cfg.validate();
  geom::require_closed(chunk, "slice_chunk");
  geom::Vec3 lo, hi;
  geom::mesh_bounds(chunk, lo, hi);
  if (lo.z() < -1e-6) throw Error("slice_chunk: chunk extends below the platform");
  const double minz = std::max(0.0, lo.z());
  const double maxz = hi.z();
  const double lh = cfg.layer_height;
  constexpr double kZEps = 1e-5;

  ManufacturingPath path;
  path.frame = PathFrame::Extruder;
  int layer_index = 0;
  bool have_prev = false;
  Vec3 prev = Vec3::Zero();

  const int i_lo = static_cast<int>(std::floor((minz + kZEps) / lh));
  const int i_hi = std::max(i_lo, static_cast<int>(std::ceil((maxz - kZEps) / lh)) - 1);
  for (int i = i_lo; i <= i_hi; ++i) {
    const double band_lo = std::max(i * lh, minz);
    const double band_hi = std::min((i + 1) * lh, maxz);
    if (band_hi - band_lo < kZEps) continue;
    const double section_z = (band_lo + band_hi) / 2;
    const auto region = geom::cross_section_z(chunk, section_z);
    if (region.empty()) continue;
    const double nozzle = std::min(std::max((i + 1) * lh, minz + lh), maxz);

    const LayerLoops loops = concentric_loops(region, cfg.line_width, cfg.sdf_cell);
    std::vector<Polygon2D> all = loops.rings;
    all.insert(all.end(), loops.centerline.begin(), loops.centerline.end());
    for (const auto& loop : all) {
      // Deterministic start: lexicographically smallest vertex.
      size_t start = 0;
      for (size_t v = 1; v < loop.size(); ++v) {
        if (loop[v].x() < loop[start].x() ||
            (loop[v].x() == loop[start].x() && loop[v].y() < loop[start].y()))
          start = v;
      }
      const auto at = [&](size_t v) {
        const Vec2& p = loop[(start + v) % loop.size()];
        return Vec3(p.x(), p.y(), nozzle);
      };
      if (have_prev)
        path.segments.push_back({layer_index, prev, at(0), false});
      for (size_t v = 0; v < loop.size(); ++v)
        path.segments.push_back({layer_index, at(v), at(v + 1), true});
      prev = at(0);
      have_prev = true;
    }
    ++layer_index;
  }
  if (path.segments.empty())
    throw Unsliceable("slice_chunk: no printable cross-sections");

  // Vertical approach and retreat through the staging altitude.
  const Vec3 first = path.segments.front().a;
  const Vec3 last = path.segments.back().b;
  std::vector<PathSegment> full;
  full.reserve(path.segments.size() + 2);
  full.push_back({path.segments.front().layer,
                  first + Vec3(0, 0, cfg.staging_altitude), first, false});
  full.insert(full.end(), path.segments.begin(), path.segments.end());
  full.push_back({path.segments.back().layer, last,
                  last + Vec3(0, 0, cfg.staging_altitude), false});
  path.segments = std::move(full);
  return path;
}

ManufacturingPath elevate_path(const ManufacturingPath& path, double extruder_offset) {
  ManufacturingPath out = path;
  out.frame = PathFrame::UavBody;
  const Vec3 lift(0, 0, extruder_offset);
  for (auto& s : out.segments) {
    s.a += lift;
    s.b += lift;
  }
  return out;
}

ReferenceStream interpolate_references(const ManufacturingPath& path, double speed,
                                       double dt) {
  if (path.segments.empty()) throw EmptyPath("interpolate_references: empty path");
  if (!(speed > 0) || !(dt > 0))
    throw Error("interpolate_references: speed and dt must be positive");
  const double ds = speed * dt;

  // Extrusion window: first printing segment's start to last one's end.
  double t_on = std::numeric_limits<double>::infinity();
  double t_off = -t_on;
  {
    double t = 0;
    for (const auto& s : path.segments) {
      const double len = (s.b - s.a).norm();
      if (s.extrude) {
        t_on = std::min(t_on, t);
        t_off = std::max(t_off, t + len / speed);
      }
      t += len / speed;
    }
  }

  // Setpoints every ds of arc length along the whole polyline, so the
  // stream duration stays within one tick of length / speed.
  ReferenceStream stream;
  stream.sample_period = dt;
  const double total = path.total_length();
  const double s_on = t_on * speed;
  const double s_off = t_off * speed;
  const auto flag = [&](double s) {
    return s >= s_on - 1e-9 && s <= s_off + 1e-9;
  };
  stream.points.push_back({0.0, path.segments.front().a, flag(0.0)});
  if (total <= 1e-12) return stream;

  const int n = std::max(1, static_cast<int>(std::ceil(total / ds - 1e-9)));
  size_t seg = 0;
  double seg_base = 0;
  double seg_len = (path.segments[0].b - path.segments[0].a).norm();
  for (int k = 1; k <= n; ++k) {
    const double s = std::min(k * ds, total);
    while (seg + 1 < path.segments.size() && s > seg_base + seg_len + 1e-12) {
      seg_base += seg_len;
      ++seg;
      seg_len = (path.segments[seg].b - path.segments[seg].a).norm();
    }
    const auto& sg = path.segments[seg];
    const double along = seg_len > 0 ? (s - seg_base) / seg_len : 0.0;
    const Vec3 p = sg.a + (sg.b - sg.a) * std::min(1.0, along);
    stream.points.push_back({k * dt, p, flag(s)});
  }
  return stream;
}

}  // namespace aeroprint::path
