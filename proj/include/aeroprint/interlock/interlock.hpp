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

#include "aeroprint/plan/depgraph.hpp"

namespace aeroprint::interlock {

using chunker::Chunk;
using geom::CutPlane;
using geom::TriangleMesh;

struct ContactPair {
  int bottom_id = -1;
  int top_id = -1;
  CutPlane shared;  // inclined generating cut between the two chunks
};

// One pair per dependency edge whose shared plane is strictly inclined:
// horizontal interfaces need no staircase, vertical ones carry no edge.
std::vector<ContactPair> contact_pairs(
    const std::vector<std::shared_ptr<const Chunk>>& chunks,
    const plan::DependencyGraph& graph);

// Replaces the inclined interface with axis-aligned steps on the global
// layer grid (multiples of layer_height from z = 0): each layer's thin
// inclination sliver moves from the top chunk into the bottom chunk.
// `next_plane_id` supplies provenance ids for the synthesized step planes.
// Returns (new bottom, new top); both closed, union volume conserved.
std::pair<TriangleMesh, TriangleMesh> interlock_pair(const TriangleMesh& bottom,
                                                     const TriangleMesh& top,
                                                     const CutPlane& shared,
                                                     double layer_height,
                                                     int& next_plane_id);

// Processes every inclined contact pair in deterministic (bottom, top)
// order; returns the updated chunk list.
std::vector<std::shared_ptr<const Chunk>> interlock_all(
    const std::vector<std::shared_ptr<const Chunk>>& chunks,
    const plan::DependencyGraph& graph, double layer_height,
    int next_plane_id = 1 << 20);

}  // namespace aeroprint::interlock
