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

#include "aeroprint/sim/mission.hpp"

#include <cmath>
#include <deque>
#include <random>

namespace aeroprint::sim {

DisturbVec PlantSpec::evaluate(const StateVec& x, double canister_fraction) const {
  DisturbVec w = constant;
  if (ground_effect_gain != 0 && ground_effect_height > 0) {
    const double z = x(2);
    w(5) += ground_effect_gain * std::max(0.0, 1.0 - z / ground_effect_height);
  }
  w(5) += mass_ramp_peak * std::min(1.0, std::max(0.0, canister_fraction));
  return w;
}

namespace {

struct LegPoint {
  Vec3 p = Vec3::Zero();
  bool extrude = false;
};

struct Leg {
  Phase phase = Phase::Transit;
  int chunk = -1;
  bool teleport = false;  // canister swap: plant resets to home first
  std::vector<LegPoint> points;
};

std::vector<Leg> build_legs(const std::vector<ChunkMission>& missions,
                            const MissionConfig& cfg, double dt) {
  std::vector<Leg> legs;
  Vec3 cur = cfg.home;
  int current_use = -1;
  for (const auto& m : missions) {
    if (m.stream.points.empty()) continue;
    if (m.canister_use != current_use && current_use >= 0) {
      Leg swap;
      swap.phase = Phase::Swap;
      swap.teleport = true;
      const int dwell = std::max(1, static_cast<int>(std::lround(cfg.swap_dwell / dt)));
      swap.points.assign(dwell, {cfg.home, false});
      legs.push_back(std::move(swap));
      cur = cfg.home;
    }
    current_use = m.canister_use;

    const Vec3 start = m.stream.points.front().p;
    const double dist = (start - cur).norm();
    if (dist > 1e-9) {
      Leg transit;
      transit.phase = Phase::Transit;
      const int n = std::max(1, static_cast<int>(std::ceil(dist / (cfg.transit_speed * dt))));
      for (int k = 1; k <= n; ++k)
        transit.points.push_back({cur + (start - cur) * (static_cast<double>(k) / n), false});
      legs.push_back(std::move(transit));
    }

    Leg print;
    print.phase = Phase::Print;
    print.chunk = m.chunk_id;
    print.points.reserve(m.stream.points.size());
    for (const auto& sp : m.stream.points) print.points.push_back({sp.p, sp.extrude});
    legs.push_back(std::move(print));
    cur = m.stream.points.back().p;
  }
  return legs;
}

}  // namespace

MissionTrace run_mission(const std::vector<ChunkMission>& missions,
                         const PlantSpec& plant, const NmpcConfig& nmpc_cfg,
                         const NmheConfig& nmhe_cfg, const MissionConfig& mission_cfg,
                         std::uint64_t seed) {
  MissionTrace trace;
  const double dt = nmpc_cfg.dt;
  const auto legs = build_legs(missions, mission_cfg, dt);
  if (legs.empty()) return trace;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto noise8 = [&](double std) {
    DisturbVec n = DisturbVec::Zero();
    if (std > 0)
      for (int i = 0; i < 8; ++i) n(i) = std * gauss(rng);
    return n;
  };

  NmpcController nmpc(nmpc_cfg);
  StateVec x_p = hover_state(mission_cfg.home);
  InputVec u_prev = nmpc_cfg.u_nom;
  DisturbVec w_hat = DisturbVec::Zero();

  std::deque<StateVec> y_window;
  std::deque<InputVec> u_window;

  // Canister depletion bookkeeping per use.
  double deposited_l = 0;
  double canister_l = missions.empty() ? 1.0 : missions.front().canister_volume_l;
  size_t mission_idx = 0;

  double t = 0;
  for (const auto& leg : legs) {
    if (leg.phase == Phase::Swap) {
      x_p = hover_state(mission_cfg.home);
      nmpc.reset_warm_start();
      u_prev = nmpc_cfg.u_nom;
      y_window.clear();
      u_window.clear();
      deposited_l = 0;
      if (mission_idx < missions.size()) canister_l = missions[mission_idx].canister_volume_l;
    }
    if (leg.phase == Phase::Print && mission_idx < missions.size()) {
      canister_l = missions[mission_idx].canister_volume_l;
      ++mission_idx;
    }

    const auto& pts = leg.points;
    const int m = static_cast<int>(pts.size());
    for (int i = 0; i < m; ++i) {
      // Sense.
      StateVec y = x_p + noise8(plant.measurement_noise_std);
      y_window.push_back(y);
      if (static_cast<int>(y_window.size()) > nmhe_cfg.window + 1) y_window.pop_front();

      // Estimate.
      const bool estimator_on = mission_cfg.estimator_enable_time >= 0 &&
                                t >= mission_cfg.estimator_enable_time;
      if (estimator_on && static_cast<int>(y_window.size()) == nmhe_cfg.window + 1 &&
          static_cast<int>(u_window.size()) == nmhe_cfg.window) {
        const auto est = nmhe_solve({y_window.begin(), y_window.end()},
                                    {u_window.begin(), u_window.end()}, w_hat, nmhe_cfg);
        w_hat = est.w;
        if (!est.status.converged) ++trace.unconverged_solves;
      }

      // Control with the lookahead clamped to the current leg.
      std::vector<StateVec> refs(nmpc_cfg.horizon);
      for (int j = 0; j < nmpc_cfg.horizon; ++j) {
        const int idx = std::min(i + j, m - 1);
        const int nxt = std::min(idx + 1, m - 1);
        StateVec r = StateVec::Zero();
        r.head<3>() = pts[idx].p;
        r.segment<3>(3) = (pts[nxt].p - pts[idx].p) / dt;
        refs[j] = r;
      }
      const auto result = nmpc.solve(y, refs, u_prev, w_hat);
      if (!result.status.converged) ++trace.unconverged_solves;
      const InputVec u = result.u;

      // Actuate the plant with the true disturbance.
      const double fraction = canister_l > 0 ? deposited_l / canister_l : 0.0;
      const DisturbVec w_true = plant.evaluate(x_p, fraction);
      x_p = step_euler(nmpc_cfg.model, x_p, u, w_true, dt);
      x_p += noise8(plant.process_noise_std) * dt;

      if (pts[i].extrude) deposited_l += mission_cfg.flow_rate_l_per_s * dt;

      TraceRow row;
      row.t = t;
      row.chunk = leg.chunk;
      row.phase = leg.phase;
      row.p_ref = pts[i].p;
      row.x = x_p;
      row.u = u;
      row.w_hat = w_hat;
      row.w_true = w_true;
      row.extrude = pts[i].extrude;
      trace.rows.push_back(row);

      if ((x_p.head<3>() - pts[i].p).norm() > mission_cfg.divergence_abort)
        throw DivergedState("run_mission: position error exceeded the abort radius");

      u_window.push_back(u);
      if (static_cast<int>(u_window.size()) > nmhe_cfg.window) u_window.pop_front();
      u_prev = u;
      t += dt;
    }
  }
  return trace;
}

}  // namespace aeroprint::sim
