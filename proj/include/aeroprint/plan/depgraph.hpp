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

#include <memory>
#include <set>
#include <vector>

#include "aeroprint/chunker/chunker.hpp"

namespace aeroprint::plan {

using chunker::Chunk;

// Co-planar chunk faces produced by one cut, as triangle indices.
struct CutFace {
  int plane_id = -1;
  int side = 0;                  // -1 below the cut, +1 above
  geom::Vec3 plane_normal;
  double plane_offset = 0;
  std::vector<int> triangles;
};

// Faces generated by planar cuts only (not original surface).
std::vector<CutFace> cut_faces(const Chunk& chunk);

// Directed edge (i -> j): chunk i rests on chunk j and must come later.
struct DependencyGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<char> manufactured;

  std::vector<int> prerequisites(int k) const;  // N^-(k)
  int dependent_count(int k) const;             // |N^+(k)|
};

// Shared planes steeper than this polar angle produce no dependency: a
// vertical interface does not put one chunk on top of the other.
inline constexpr double kMaxDependencyAngle = 89.0 * M_PI / 180.0;

// Face-contact dependency test: some cut-face pair coplanar within eps,
// overlapping with positive area, the upper chunk on the positive side.
bool is_dependent(const Chunk& upper, const Chunk& lower,
                  double eps = geom::tol::kCoplanar);

DependencyGraph build_graph(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                            double eps = geom::tol::kCoplanar);

// Chunks whose prerequisites are all manufactured.
std::set<int> available_set(const DependencyGraph& graph);

// Horizontal bands between consecutive ground-cut heights; chunks belong by
// volume centroid.
struct GroundLayers {
  std::vector<double> heights;  // ascending, deduplicated
  std::vector<int> layer_of;    // per chunk id

  int layer_count() const { return static_cast<int>(heights.size()) + 1; }
};

GroundLayers make_ground_layers(const std::vector<geom::CutPlane>& cuts,
                                const std::vector<std::shared_ptr<const Chunk>>& chunks);

// Layer-by-layer greedy ordering: most-depended-on available chunk first,
// ties to the lowest id; a layer must finish before the next begins.
std::vector<int> printing_sequence(const DependencyGraph& graph,
                                   const GroundLayers& layers);

// Chunk-to-canister assignment in sequence order. Canisters are swapped in
// fresh between flights, so assignment indices count canister uses (use k
// holds canisters[k % m]). InsufficientMaterial when a chunk fits no
// canister size.
std::vector<std::pair<int, int>> assign_canisters(
    const std::vector<double>& sequence_volumes_l,
    const std::vector<double>& canisters_l);

struct BuildPlan {
  std::vector<int> sequence;                      // chunk ids
  std::vector<std::pair<int, int>> assignments;   // (chunk id, canister use)
  DependencyGraph graph;
  GroundLayers layers;
};

BuildPlan make_plan(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                    const std::vector<geom::CutPlane>& cuts,
                    const std::vector<double>& canisters_l,
                    double eps = geom::tol::kCoplanar);

}  // namespace aeroprint::plan
