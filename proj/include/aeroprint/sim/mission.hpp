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

#include <cstdint>
#include <vector>

#include "aeroprint/path/pathgen.hpp"
#include "aeroprint/sim/nmhe.hpp"
#include "aeroprint/sim/nmpc.hpp"

namespace aeroprint::sim {

using geom::Vec3;

// True plant mismatch: a constant vector plus ground effect and canister
// mass-depletion terms on the vertical acceleration.
struct PlantSpec {
  DisturbVec constant = DisturbVec::Zero();
  double ground_effect_gain = 0.5;    // c_g [m/s^2] at ground level
  double ground_effect_height = 0.5;  // z_ge [m], no effect above
  double mass_ramp_peak = 0.3;        // [m/s^2] when a canister runs empty
  double process_noise_std = 0.0;
  double measurement_noise_std = 0.0;

  DisturbVec evaluate(const StateVec& x, double canister_fraction) const;
};

struct ChunkMission {
  int chunk_id = -1;
  int canister_use = 0;
  double canister_volume_l = 1.0;
  path::ReferenceStream stream;  // UAV-frame reference
};

enum class Phase : int { Transit = 0, Print = 1, Swap = 2 };

struct TraceRow {
  double t = 0;
  int chunk = -1;
  Phase phase = Phase::Transit;
  Vec3 p_ref = Vec3::Zero();
  StateVec x = StateVec::Zero();
  InputVec u = InputVec::Zero();
  DisturbVec w_hat = DisturbVec::Zero();
  DisturbVec w_true = DisturbVec::Zero();
  bool extrude = false;
};

struct MissionTrace {
  std::vector<TraceRow> rows;
  int unconverged_solves = 0;
};

struct MissionConfig {
  Vec3 home{-1.0, -1.0, 0.5};
  double transit_speed = 0.3;          // [m/s]
  double swap_dwell = 2.0;             // [s] at home per canister swap
  double estimator_enable_time = 0.0;  // [s]; negative disables the NMHE
  double divergence_abort = 5.0;       // [m]
  double flow_rate_l_per_s = 0.0;      // deposition volume rate, for the ramp
};

// Closed-loop 20 Hz execution: sense, estimate, control, actuate. Canister
// swaps teleport the plant home and dwell (no dynamics fidelity); transits
// are flown. Deterministic for a fixed seed.
MissionTrace run_mission(const std::vector<ChunkMission>& missions,
                         const PlantSpec& plant, const NmpcConfig& nmpc_cfg,
                         const NmheConfig& nmhe_cfg, const MissionConfig& mission_cfg,
                         std::uint64_t seed);

}  // namespace aeroprint::sim
