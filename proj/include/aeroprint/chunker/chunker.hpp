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
#include <optional>
#include <vector>

#include "aeroprint/geom/core.hpp"
#include "aeroprint/geom/obb.hpp"

namespace aeroprint::chunker {

using geom::CutPlane;
using geom::TriangleMesh;
using geom::Vec3;

// A printing task: one leaf of the cut tree. Volume, bounding box and the
// per-plane face summary are cached at construction.
struct Chunk {
  int id = -1;
  TriangleMesh mesh;
  std::vector<std::pair<CutPlane, int>> generating_cuts;  // (plane, side)
  double volume_l = 0;
  geom::OrientedBoundingBox obb;

  struct CutFaceInfo {
    int plane_id;
    int side;        // -1 below the cut, +1 above
    double area;     // total co-planar face area [m^2]
    bool ground_parallel;
  };
  std::vector<CutFaceInfo> cut_faces;  // only planes the chunk still touches
};

std::shared_ptr<const Chunk> make_chunk(
    TriangleMesh mesh, std::vector<std::pair<CutPlane, int>> cuts);

// BSP node: leaves carry chunks, internal nodes the cut and the mesh it
// split. The negative child is the left subordinate.
struct BspNode {
  CutPlane plane;
  TriangleMesh mesh;  // intermediate mesh at this node
  std::shared_ptr<const BspNode> left;   // negative side
  std::shared_ptr<const BspNode> right;  // positive side
  std::shared_ptr<const Chunk> chunk;    // set iff leaf

  bool is_leaf() const { return chunk != nullptr; }
};

struct ScoreBreakdown {
  double dispersion = 0;  // h_d
  double seeds = 0;       // sum of g(C_k)
  double ground = 0;      // h_g
  double critical = 0;    // h_cr
  double total() const { return dispersion + seeds + ground + critical; }
};

struct BspTree {
  std::shared_ptr<const BspNode> root;
  std::vector<std::shared_ptr<const Chunk>> leaves;  // left-to-right
  std::vector<CutPlane> cuts;                        // application order
  ScoreBreakdown score;
};

struct HeuristicWeights {
  double w_d = 10.0;     // dispersion, > 0
  double w_s = -5.0;     // seed reward, <= 0
  double w_f = -1.0;     // positive-face reward, <= 0
  double w_g = -3.0;     // ground-cut reward, <= 0
  double w_cr = 1000.0;  // critical penalty, >> 0
  double v_cr_fraction = 0.05;  // V_cr as fraction of total volume
  void validate() const;
};

struct SamplerConfig {
  double phi_ar_max = 45.0 * M_PI / 180.0;  // adhesion bound [rad]
  double extruder_l = 0.03;                 // extruder head length [m]
  double extruder_h = 0.03;                 // extruder head height [m]
  int n_normals = 16;                       // samples per iteration
  int planes_per_family = 5;
  void validate() const;
};

struct FleetSpec {
  std::vector<double> canisters_l;  // descending
  void validate() const;
};

struct BeamConfig {
  int w_inner = 10;
  int w_outer = 10;
  int max_iterations = 20;
  double line_width = 0.03;  // feeds the thin-chunk penalty [m]
  void validate() const;
};

// arctan(h / l): largest cut inclination that keeps the extruder head clear
// of previously deposited material.
double phi_max_collision(double l, double h);

// max(phi_ar, phi_coll), the polar bound of the normal sampling space.
double phi_max(const SamplerConfig& cfg);

// Uniform samples over the spherical cap phi in [0, phi_max], theta in
// [-pi, pi]; deterministic for a fixed seed.
std::vector<Vec3> sample_normals(const SamplerConfig& cfg, std::uint64_t seed);

// k cut planes with this normal, origins at interior fractions i/(k+1) of
// the mesh support interval along the normal.
std::vector<CutPlane> plane_family(const Vec3& normal, const TriangleMesh& mesh,
                                   int k);

struct Dispersion {
  double mu = 0;
  double sigma = 0;  // population
  double c_v = 0;
};
Dispersion volume_dispersion(const std::vector<double>& volumes);

// W_s * s_k + W_f * (number of cut faces the chunk lies negative to).
// A chunk with no non-ground cut faces is vacuously a seed.
double seed_score(const Chunk& chunk, const HeuristicWeights& w);

// W_g * (number of cuts whose normal is parallel to +z).
double ground_score(const std::vector<CutPlane>& cuts, const HeuristicWeights& w);

// Sum of the small-volume and thin-box penalties, Eq. style: volumes below
// v_cr_l count their volume, boxes with min dimension below line_width
// count 1, both gained by w_cr.
double critical_score(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                      double v_cr_l, double line_width,
                      const HeuristicWeights& w);

ScoreBreakdown tree_heuristic(const BspTree& tree, const HeuristicWeights& w,
                              double v_cr_l, double line_width);

// Greedy fill in order. Canisters are replaced between flights, so the list
// cycles: assignment indices count canister uses, use k holding
// canisters[k % m]. nullopt when some volume fits no canister size.
std::optional<std::vector<int>> greedy_assign(const std::vector<double>& volumes_l,
                                              const std::vector<double>& canisters_l);

// Fleet-aware terminal test: the descending-sorted chunk volumes admit a
// greedy canister assignment.
bool is_terminal(const BspTree& tree, const FleetSpec& fleet);

// Beam search over trees of planar cuts; returns the best terminal tree.
// `best_score_trace`, when given, records the best pool score per iteration.
BspTree beam_search(const TriangleMesh& mesh, const SamplerConfig& sampler,
                    const HeuristicWeights& weights, const FleetSpec& fleet,
                    const BeamConfig& beam, std::uint64_t seed,
                    std::vector<double>* best_score_trace = nullptr);

}  // namespace aeroprint::chunker
