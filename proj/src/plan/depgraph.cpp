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

#include "aeroprint/plan/depgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aeroprint/geom/polygon.hpp"

namespace aeroprint::plan {

std::vector<CutFace> cut_faces(const Chunk& chunk) {
  if (!chunk.generating_cuts.empty() && chunk.mesh.tags.empty())
    throw MissingProvenance("cut_faces: chunk lacks face provenance");
  std::map<std::pair<int, int>, CutFace> by_key;  // (plane id, side)
  for (size_t f = 0; f < chunk.mesh.tags.size(); ++f) {
    const auto& tag = chunk.mesh.tags[f];
    if (!tag.from_cut) continue;
    auto& face = by_key[{tag.plane_id, tag.side}];
    if (face.triangles.empty()) {
      face.plane_id = tag.plane_id;
      face.side = tag.side;
      face.plane_normal = tag.plane_normal;
      face.plane_offset = tag.plane_offset;
    }
    face.triangles.push_back(static_cast<int>(f));
  }
  std::vector<CutFace> out;
  for (auto& [key, face] : by_key) {
    double area = 0;
    for (int f : face.triangles) area += chunk.mesh.face_area(f);
    if (area > geom::tol::kArea) out.push_back(std::move(face));
  }
  return out;
}

std::vector<int> DependencyGraph::prerequisites(int k) const {
  std::vector<int> out;
  for (const auto& [i, j] : edges)
    if (i == k) out.push_back(j);
  return out;
}

int DependencyGraph::dependent_count(int k) const {
  int c = 0;
  for (const auto& [i, j] : edges)
    if (j == k) ++c;
  return c;
}

bool is_dependent(const Chunk& upper, const Chunk& lower, double eps) {
  const auto upper_faces = cut_faces(upper);
  const auto lower_faces = cut_faces(lower);
  const double min_nz = std::cos(kMaxDependencyAngle);
  for (const auto& fu : upper_faces) {
    if (fu.side <= 0) continue;  // upper must sit on the positive side
    if (fu.plane_normal.z() < min_nz) continue;
    for (const auto& fl : lower_faces) {
      if (fl.side >= 0) continue;
      if (fu.plane_normal.cross(fl.plane_normal).norm() > geom::tol::kParallel)
        continue;
      if (std::abs(fu.plane_offset - fl.plane_offset) > eps) continue;
      const double area = geom::face_polygon_overlap(upper.mesh, fu.triangles,
                                                     lower.mesh, fl.triangles);
      if (area > geom::tol::kArea) return true;
    }
  }
  return false;
}

DependencyGraph build_graph(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                            double eps) {
  DependencyGraph g;
  g.n = static_cast<int>(chunks.size());
  g.manufactured.assign(g.n, 0);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (i == j) continue;
      if (is_dependent(*chunks[i], *chunks[j], eps)) g.edges.emplace_back(i, j);
    }
  }
  // Kahn check for acyclicity.
  std::vector<int> deps(g.n, 0);
  for (const auto& [i, j] : g.edges) ++deps[i];
  std::vector<int> ready;
  for (int k = 0; k < g.n; ++k)
    if (deps[k] == 0) ready.push_back(k);
  int seen = 0;
  while (!ready.empty()) {
    const int j = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& [a, b] : g.edges)
      if (b == j && --deps[a] == 0) ready.push_back(a);
  }
  if (seen != g.n)
    throw CycleDetected("build_graph: dependency cycle (tolerance inconsistency)");
  return g;
}

std::set<int> available_set(const DependencyGraph& graph) {
  std::set<int> out;
  for (int k = 0; k < graph.n; ++k) {
    if (graph.manufactured[k]) continue;
    bool ok = true;
    for (int p : graph.prerequisites(k))
      if (!graph.manufactured[p]) {
        ok = false;
        break;
      }
    if (ok) out.insert(k);
  }
  return out;
}

GroundLayers make_ground_layers(const std::vector<geom::CutPlane>& cuts,
                                const std::vector<std::shared_ptr<const Chunk>>& chunks) {
  GroundLayers layers;
  for (const auto& c : cuts) {
    if (!c.is_ground()) continue;
    const double z = c.offset() / c.normal.z();
    bool dup = false;
    for (double h : layers.heights) dup |= std::abs(h - z) < 1e-6;
    if (!dup) layers.heights.push_back(z);
  }
  std::sort(layers.heights.begin(), layers.heights.end());
  layers.layer_of.resize(chunks.size());
  for (size_t k = 0; k < chunks.size(); ++k) {
    const double z = geom::volume_centroid(chunks[k]->mesh).z();
    int layer = 0;
    while (layer < static_cast<int>(layers.heights.size()) &&
           z >= layers.heights[layer])
      ++layer;
    layers.layer_of[k] = layer;
  }
  return layers;
}

std::vector<int> printing_sequence(const DependencyGraph& graph,
                                   const GroundLayers& layers) {
  DependencyGraph g = graph;  // local manufactured state
  std::vector<int> seq;
  int layer = 0;
  while (static_cast<int>(seq.size()) < g.n) {
    const auto avail = available_set(g);
    if (avail.empty())
      throw Deadlock("printing_sequence: no available chunk but chunks remain");
    int best = -1, best_score = -1;
    for (int k : avail) {
      if (layers.layer_of[k] != layer) continue;
      const int s = g.dependent_count(k);
      if (s > best_score) {
        best = k;
        best_score = s;
      }
    }
    if (best < 0) {
      if (++layer >= layers.layer_count())
        throw Deadlock("printing_sequence: available chunks violate layer order");
      continue;
    }
    seq.push_back(best);
    g.manufactured[best] = 1;
  }
  return seq;
}

std::vector<std::pair<int, int>> assign_canisters(
    const std::vector<double>& sequence_volumes_l,
    const std::vector<double>& canisters_l) {
  const auto assign = chunker::greedy_assign(sequence_volumes_l, canisters_l);
  if (!assign)
    throw InsufficientMaterial("assign_canisters: a chunk fits no canister");
  std::vector<std::pair<int, int>> out;
  out.reserve(assign->size());
  for (size_t j = 0; j < assign->size(); ++j)
    out.emplace_back(static_cast<int>(j), (*assign)[j]);
  return out;
}

BuildPlan make_plan(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                    const std::vector<geom::CutPlane>& cuts,
                    const std::vector<double>& canisters_l, double eps) {
  BuildPlan plan;
  plan.graph = build_graph(chunks, eps);
  plan.layers = make_ground_layers(cuts, chunks);
  plan.sequence = printing_sequence(plan.graph, plan.layers);
  std::vector<double> volumes;
  volumes.reserve(plan.sequence.size());
  for (int id : plan.sequence) volumes.push_back(chunks[id]->volume_l);
  const auto uses = assign_canisters(volumes, canisters_l);
  plan.assignments.reserve(uses.size());
  for (size_t j = 0; j < uses.size(); ++j)
    plan.assignments.emplace_back(plan.sequence[j], uses[j].second);
  return plan;
}

}  // namespace aeroprint::plan
