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

#include "aeroprint/chunker/chunker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "aeroprint/geom/split.hpp"

namespace aeroprint::chunker {

void HeuristicWeights::validate() const {
  if (!(w_d > 0)) throw Error("weights: w_d must be positive");
  if (w_s > 0 || w_f > 0 || w_g > 0)
    throw Error("weights: reward gains w_s, w_f, w_g must be non-positive");
  if (!(w_cr > 0) || !std::isfinite(w_cr))
    throw Error("weights: w_cr must be a positive finite penalty");
  if (!(v_cr_fraction >= 0)) throw Error("weights: v_cr_fraction must be >= 0");
}

void SamplerConfig::validate() const {
  const double pm = phi_max(*this);
  if (!(pm > 0) || pm > M_PI / 2 + 1e-12)
    throw Error("sampler: phi_max must lie in (0, pi/2]");
  if (n_normals < 1 || planes_per_family < 1)
    throw Error("sampler: counts must be >= 1");
}

void FleetSpec::validate() const {
  if (canisters_l.empty()) throw Error("fleet: no canisters");
  for (size_t i = 0; i < canisters_l.size(); ++i) {
    if (!(canisters_l[i] > 0)) throw Error("fleet: canister volumes must be positive");
    if (i > 0 && canisters_l[i] > canisters_l[i - 1] + 1e-12)
      throw Error("fleet: canisters must be sorted descending");
  }
}

void BeamConfig::validate() const {
  if (w_inner < 1 || w_outer < 1) throw Error("beam: widths must be >= 1");
  if (max_iterations < 1) throw Error("beam: max_iterations must be >= 1");
  if (!(line_width > 0)) throw Error("beam: line_width must be positive");
}

std::shared_ptr<const Chunk> make_chunk(
    TriangleMesh mesh, std::vector<std::pair<CutPlane, int>> cuts) {
  auto chunk = std::make_shared<Chunk>();
  chunk->mesh = std::move(mesh);
  chunk->generating_cuts = std::move(cuts);
  chunk->volume_l = geom::mesh_volume_liters(chunk->mesh);
  chunk->obb = geom::compute_obb(chunk->mesh);

  std::map<int, Chunk::CutFaceInfo> by_plane;
  for (size_t f = 0; f < chunk->mesh.tags.size(); ++f) {
    const auto& tag = chunk->mesh.tags[f];
    if (!tag.from_cut) continue;
    auto [it, inserted] = by_plane.try_emplace(tag.plane_id);
    auto& info = it->second;
    if (inserted) {
      info.plane_id = tag.plane_id;
      info.side = tag.side;
      info.ground_parallel =
          tag.plane_normal.cross(Vec3::UnitZ()).norm() <= geom::tol::kParallel;
      info.area = 0;
    }
    info.area += chunk->mesh.face_area(static_cast<int>(f));
  }
  for (auto& [id, info] : by_plane)
    if (info.area > geom::tol::kArea) chunk->cut_faces.push_back(info);
  return chunk;
}

double phi_max_collision(double l, double h) {
  if (!(l > 0) || !(h > 0))
    throw NonPositiveDimension("phi_max_collision: l and h must be positive");
  return std::atan2(h, l);
}

double phi_max(const SamplerConfig& cfg) {
  return std::max(cfg.phi_ar_max, phi_max_collision(cfg.extruder_l, cfg.extruder_h));
}

std::vector<Vec3> sample_normals(const SamplerConfig& cfg, std::uint64_t seed) {
  const double pm = phi_max(cfg);
  std::mt19937_64 rng(seed);
  // Uniform over the cap: z uniform in [cos(phi_max), 1], theta uniform.
  std::uniform_real_distribution<double> uz(std::cos(pm), 1.0);
  std::uniform_real_distribution<double> ut(-M_PI, M_PI);
  std::vector<Vec3> out;
  out.reserve(cfg.n_normals);
  for (int i = 0; i < cfg.n_normals; ++i) {
    const double z = uz(rng);
    const double theta = ut(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
  }
  return out;
}

std::vector<CutPlane> plane_family(const Vec3& normal, const TriangleMesh& mesh,
                                   int k) {
  if (mesh.vertices.empty()) throw EmptyMesh("plane_family: empty mesh");
  if (k < 1) throw Error("plane_family: k must be >= 1");
  const Vec3 n = normal.normalized();
  double smin, smax;
  geom::support_interval(mesh, n, smin, smax);
  std::vector<CutPlane> out;
  out.reserve(k);
  for (int i = 1; i <= k; ++i) {
    const double t = smin + (smax - smin) * static_cast<double>(i) / (k + 1);
    out.push_back(geom::make_plane(n, n * t));
  }
  return out;
}

Dispersion volume_dispersion(const std::vector<double>& volumes) {
  if (volumes.empty()) throw EmptyList("volume_dispersion: empty volume list");
  Dispersion d;
  for (double v : volumes) {
    if (!(v > 0)) throw Error("volume_dispersion: volumes must be positive");
    d.mu += v;
  }
  d.mu /= static_cast<double>(volumes.size());
  double acc = 0;
  for (double v : volumes) acc += (v - d.mu) * (v - d.mu);
  d.sigma = std::sqrt(acc / static_cast<double>(volumes.size()));
  d.c_v = d.sigma / d.mu;
  return d;
}

double seed_score(const Chunk& chunk, const HeuristicWeights& w) {
  if (!chunk.generating_cuts.empty() && chunk.mesh.tags.empty())
    throw MissingProvenance("seed_score: chunk lacks face provenance");
  bool seed = true;
  int positive_faces = 0;
  for (const auto& info : chunk.cut_faces) {
    if (info.side < 0) ++positive_faces;  // face acts as support above
    if (!info.ground_parallel && info.side > 0) seed = false;
  }
  return w.w_s * (seed ? 1.0 : 0.0) + w.w_f * positive_faces;
}

double ground_score(const std::vector<CutPlane>& cuts, const HeuristicWeights& w) {
  int count = 0;
  for (const auto& c : cuts) count += c.is_ground() ? 1 : 0;
  return w.w_g * count;
}

double critical_score(const std::vector<std::shared_ptr<const Chunk>>& chunks,
                      double v_cr_l, double line_width,
                      const HeuristicWeights& w) {
  double h = 0;
  for (const auto& c : chunks) {
    if (c->volume_l < v_cr_l) h += w.w_cr * c->volume_l;
    if (2.0 * c->obb.min_extent() < line_width) h += w.w_cr;
  }
  return h;
}

ScoreBreakdown tree_heuristic(const BspTree& tree, const HeuristicWeights& w,
                              double v_cr_l, double line_width) {
  if (tree.leaves.empty()) throw Error("tree_heuristic: tree has no leaves");
  ScoreBreakdown s;
  std::vector<double> volumes;
  volumes.reserve(tree.leaves.size());
  for (const auto& c : tree.leaves) volumes.push_back(c->volume_l);
  s.dispersion = volumes.size() > 1 ? w.w_d * volume_dispersion(volumes).c_v : 0.0;
  for (const auto& c : tree.leaves) s.seeds += seed_score(*c, w);
  s.ground = ground_score(tree.cuts, w);
  s.critical = critical_score(tree.leaves, v_cr_l, line_width, w);
  return s;
}

std::optional<std::vector<int>> greedy_assign(const std::vector<double>& volumes_l,
                                              const std::vector<double>& canisters_l) {
  if (canisters_l.empty()) return std::nullopt;
  const double largest =
      *std::max_element(canisters_l.begin(), canisters_l.end());
  for (double v : volumes_l)
    if (v > largest + 1e-12) return std::nullopt;

  std::vector<int> assign(volumes_l.size(), -1);
  const size_t m = canisters_l.size();
  size_t use = 0;
  double remaining = canisters_l[0];
  for (size_t j = 0; j < volumes_l.size();) {
    if (volumes_l[j] <= remaining + 1e-12) {
      remaining -= volumes_l[j];
      assign[j] = static_cast<int>(use);
      ++j;
    } else {
      ++use;
      remaining = canisters_l[use % m];
    }
  }
  return assign;
}

bool is_terminal(const BspTree& tree, const FleetSpec& fleet) {
  std::vector<double> volumes;
  volumes.reserve(tree.leaves.size());
  for (const auto& c : tree.leaves) volumes.push_back(c->volume_l);
  std::sort(volumes.rbegin(), volumes.rend());
  return greedy_assign(volumes, fleet.canisters_l).has_value();
}

namespace {

void collect_leaves(const std::shared_ptr<const BspNode>& node,
                    std::vector<std::shared_ptr<const Chunk>>& out) {
  if (!node) return;
  if (node->is_leaf()) {
    out.push_back(node->chunk);
    return;
  }
  collect_leaves(node->left, out);
  collect_leaves(node->right, out);
}

// Applies `plane` to every leaf it intersects. Returns nullptr when nothing
// changed (plane misses or only produces slivers).
std::shared_ptr<const BspNode> extend_node(const std::shared_ptr<const BspNode>& node,
                                           const CutPlane& plane) {
  if (!node->is_leaf()) {
    auto new_left = extend_node(node->left, plane);
    auto new_right = extend_node(node->right, plane);
    if (!new_left && !new_right) return nullptr;
    auto n = std::make_shared<BspNode>(*node);
    if (new_left) n->left = new_left;
    if (new_right) n->right = new_right;
    return n;
  }
  const auto& chunk = node->chunk;
  double smin, smax;
  geom::support_interval(chunk->mesh, plane.normal, smin, smax);
  const double off = plane.offset();
  if (off <= smin + geom::tol::kOnPlane || off >= smax - geom::tol::kOnPlane)
    return nullptr;
  geom::SplitResult split;
  try {
    split = geom::split_mesh(chunk->mesh, plane);
  } catch (const DegenerateCut&) {
    return nullptr;
  }
  if (split.negative.empty() || split.positive.empty()) return nullptr;

  auto cuts_neg = chunk->generating_cuts;
  cuts_neg.emplace_back(plane, -1);
  auto cuts_pos = chunk->generating_cuts;
  cuts_pos.emplace_back(plane, +1);

  auto internal = std::make_shared<BspNode>();
  internal->plane = plane;
  internal->mesh = chunk->mesh;
  auto left = std::make_shared<BspNode>();
  left->chunk = make_chunk(std::move(split.negative), std::move(cuts_neg));
  auto right = std::make_shared<BspNode>();
  right->chunk = make_chunk(std::move(split.positive), std::move(cuts_pos));
  internal->left = left;
  internal->right = right;
  return internal;
}

struct Candidate {
  BspTree tree;
  bool terminal = false;
  std::uint64_t order = 0;  // insertion tie-break

  double score() const { return tree.score.total(); }
  size_t cuts() const { return tree.cuts.size(); }
};

// Relabels leaves 0..N-1 in left-to-right order.
std::shared_ptr<const BspNode> relabel(const std::shared_ptr<const BspNode>& node,
                                       int& next_id) {
  auto n = std::make_shared<BspNode>(*node);
  if (node->is_leaf()) {
    auto chunk = std::make_shared<Chunk>(*node->chunk);
    chunk->id = next_id++;
    n->chunk = chunk;
  } else {
    n->left = relabel(node->left, next_id);
    n->right = relabel(node->right, next_id);
  }
  return n;
}

BspTree finalize_tree(BspTree tree) {
  int next_id = 0;
  tree.root = relabel(tree.root, next_id);
  tree.leaves.clear();
  collect_leaves(tree.root, tree.leaves);
  return tree;
}

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.score() != b.score()) return a.score() < b.score();
  if (a.cuts() != b.cuts()) return a.cuts() < b.cuts();
  return a.order < b.order;
}

}  // namespace

BspTree beam_search(const TriangleMesh& mesh, const SamplerConfig& sampler,
                    const HeuristicWeights& weights, const FleetSpec& fleet,
                    const BeamConfig& beam, std::uint64_t seed,
                    std::vector<double>* best_score_trace) {
  sampler.validate();
  weights.validate();
  fleet.validate();
  beam.validate();
  geom::require_closed(mesh, "beam_search");

  const double total_l = geom::mesh_volume_liters(mesh);
  const double v_cr_l = weights.v_cr_fraction * total_l;
  const auto rescore = [&](BspTree& t) {
    t.score = tree_heuristic(t, weights, v_cr_l, beam.line_width);
  };

  std::uint64_t order_counter = 0;
  BspTree root_tree;
  {
    auto root = std::make_shared<BspNode>();
    root->chunk = make_chunk(mesh, {});
    root_tree.root = root;
    root_tree.leaves = {root->chunk};
    rescore(root_tree);
  }
  std::vector<Candidate> pool{{root_tree, is_terminal(root_tree, fleet), order_counter++}};

  std::mt19937_64 rng(seed);
  int next_plane_id = 0;

  for (int iteration = 0; iteration < beam.max_iterations; ++iteration) {
    if (best_score_trace) best_score_trace->push_back(pool.front().score());
    if (std::all_of(pool.begin(), pool.end(),
                    [](const Candidate& c) { return c.terminal; })) {
      return finalize_tree(pool.front().tree);
    }

    // Fresh candidate cuts, the ground normal always among them.
    std::vector<Vec3> normals = sample_normals(sampler, rng());
    normals.push_back(Vec3::UnitZ());
    std::vector<CutPlane> planes;
    for (const auto& n : normals) {
      for (auto& p : plane_family(n, mesh, sampler.planes_per_family)) {
        p.id = next_plane_id++;
        planes.push_back(p);
      }
    }

    std::vector<Candidate> merged;
    for (const auto& parent : pool) {
      if (parent.terminal) merged.push_back(parent);  // "no further cut"
      std::vector<Candidate> extensions;
      for (const auto& plane : planes) {
        auto new_root = extend_node(parent.tree.root, plane);
        if (!new_root) continue;
        Candidate cand;
        cand.tree.root = new_root;
        collect_leaves(new_root, cand.tree.leaves);
        cand.tree.cuts = parent.tree.cuts;
        cand.tree.cuts.push_back(plane);
        rescore(cand.tree);
        cand.terminal = is_terminal(cand.tree, fleet);
        cand.order = order_counter++;

        double leaf_sum = 0;
        for (const auto& c : cand.tree.leaves) leaf_sum += c->volume_l;
        if (std::abs(leaf_sum - total_l) > 1e-6 * std::abs(total_l))
          throw Error("beam_search: leaf volumes do not conserve the input");
        extensions.push_back(std::move(cand));
      }
      std::sort(extensions.begin(), extensions.end(), candidate_less);
      const size_t keep = std::min<size_t>(beam.w_inner, extensions.size());
      for (size_t i = 0; i < keep; ++i) merged.push_back(std::move(extensions[i]));
    }
    if (merged.empty()) break;
    std::sort(merged.begin(), merged.end(), candidate_less);
    if (merged.size() > static_cast<size_t>(beam.w_outer))
      merged.resize(beam.w_outer);
    pool.swap(merged);
  }

  // Iteration cap: settle for the best terminal tree seen in the pool.
  for (const auto& c : pool)
    if (c.terminal) return finalize_tree(c.tree);
  throw NoTerminalTree("beam_search: no terminal tree within the iteration cap");
}

}  // namespace aeroprint::chunker
