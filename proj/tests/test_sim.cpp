#include <doctest.h>

#include <random>

#include "aeroprint/sim/mission.hpp"
#include "aeroprint/sim/nmhe.hpp"
#include "aeroprint/sim/nmpc.hpp"

using namespace aeroprint;
using namespace aeroprint::sim;

namespace {

StateVec random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> up(-1, 1), uv(-0.5, 0.5), ua(-0.2, 0.2);
  StateVec x;
  x << up(rng), up(rng), up(rng) + 1.5, uv(rng), uv(rng), uv(rng), ua(rng), ua(rng);
  return x;
}

InputVec random_input(std::mt19937_64& rng, const NmpcConfig& cfg) {
  std::uniform_real_distribution<double> u01(0, 1);
  InputVec u;
  for (int i = 0; i < 3; ++i)
    u(i) = cfg.u_min(i) + u01(rng) * (cfg.u_max(i) - cfg.u_min(i));
  return u;
}

DisturbVec random_disturbance(std::mt19937_64& rng, const NmheConfig& cfg) {
  std::uniform_real_distribution<double> u01(0, 1);
  DisturbVec w;
  for (int i = 0; i < 8; ++i)
    w(i) = cfg.w_min(i) + u01(rng) * (cfg.w_max(i) - cfg.w_min(i));
  return w;
}

// Classic fourth-order step for the convergence-order reference.
StateVec step_rk4(const VehicleModel& m, const StateVec& x, const InputVec& u,
                  const DisturbVec& w, double dt) {
  const StateVec k1 = dynamics(m, x, u, w);
  const StateVec k2 = dynamics(m, x + 0.5 * dt * k1, u, w);
  const StateVec k3 = dynamics(m, x + 0.5 * dt * k2, u, w);
  const StateVec k4 = dynamics(m, x + dt * k3, u, w);
  return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace

TEST_CASE("dynamics: hover equilibrium is exactly zero") {
  VehicleModel m;
  StateVec x = hover_state(geom::Vec3(0.3, -0.2, 1.0));
  const StateVec dx = dynamics(m, x, InputVec(m.gravity, 0, 0), DisturbVec::Zero());
  CHECK(dx.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("dynamics: additive disturbance and tilt response") {
  VehicleModel m;
  StateVec x = hover_state(geom::Vec3(0, 0, 1));
  DisturbVec w = DisturbVec::Zero();
  w(3) = 0.3;
  const StateVec dx = dynamics(m, x, InputVec(9.81, 0, 0), w);
  CHECK(dx(3) == doctest::Approx(0.3));
  CHECK(dx(4) == doctest::Approx(0));
  CHECK(dx(5) == doctest::Approx(0));

  // theta = 0.1, T = 10: x-acceleration 10 sin(0.1) at rest.
  StateVec tilted = x;
  tilted(7) = 0.1;
  const StateVec dx2 = dynamics(m, tilted, InputVec(10, 0, 0.1), DisturbVec::Zero());
  CHECK(dx2(3) == doctest::Approx(10 * std::sin(0.1)).epsilon(1e-12));
}

TEST_CASE("step_euler: arithmetic and first-order convergence") {
  VehicleModel m;
  StateVec x = hover_state(geom::Vec3(0, 0, 1));
  CHECK((step_euler(m, x, InputVec(m.gravity, 0, 0), DisturbVec::Zero(), 0.05) - x)
            .lpNorm<Eigen::Infinity>() == 0.0);

  // Constant 1 m/s^2 along x for 1 s.
  DisturbVec w = DisturbVec::Zero();
  w(3) = 1.0;
  StateVec xe = x;
  for (int k = 0; k < 20; ++k) xe = step_euler(m, xe, InputVec(m.gravity, 0, 0), w, 0.05);
  CHECK(xe(3) > 0.85);  // drag bleeds a little off the raw 1.0

  // Euler vs RK4 on a 1 s maneuver: error scales like O(dt).
  const InputVec u(10.5, 0.15, -0.1);
  const auto endpoint = [&](double dt, bool rk4) {
    StateVec s = x;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < n; ++k)
      s = rk4 ? step_rk4(m, s, u, w, dt) : step_euler(m, s, u, w, dt);
    return s;
  };
  const StateVec truth = endpoint(0.0005, true);
  const double e1 = (endpoint(0.05, false) - truth).norm();
  const double e2 = (endpoint(0.025, false) - truth).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("attitude: first-order response hits 63.2% at tau") {
  VehicleModel m;
  StateVec x = hover_state(geom::Vec3(0, 0, 1));
  const double phi_ref = 0.2;
  const double dt = 0.001;  // fine integration of the continuous model
  StateVec s = x;
  for (int k = 0; k < 200; ++k)  // t = 0.2 s = tau
    s = step_euler(m, s, InputVec(m.gravity, phi_ref, 0), DisturbVec::Zero(), dt);
  CHECK(s(6) == doctest::Approx(phi_ref * 0.632).epsilon(0.02));
}

TEST_CASE("nmpc: stationary at the reference, climbs when asked") {
  NmpcConfig cfg;
  NmpcController nmpc(cfg);
  const StateVec hover = hover_state(geom::Vec3(0, 0, 1));
  std::vector<StateVec> refs(cfg.horizon, hover);
  const auto res = nmpc.solve(hover, refs, cfg.u_nom, DisturbVec::Zero());
  CHECK((res.u - cfg.u_nom).lpNorm<Eigen::Infinity>() < 1e-3);

  StateVec above = hover;
  above(2) += 1.0;
  std::vector<StateVec> up(cfg.horizon, above);
  NmpcController nmpc2(cfg);
  const auto res2 = nmpc2.solve(hover, up, cfg.u_nom, DisturbVec::Zero());
  CHECK(res2.u(0) > cfg.model.gravity);
}

TEST_CASE("nmpc: objective gradient matches central finite differences") {
  NmpcConfig cfg;
  cfg.horizon = 12;  // short horizon keeps the test quick
  NmpcController nmpc(cfg);
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVec x0 = random_state(rng);
    const InputVec u_prev = random_input(rng, cfg);
    NmheConfig box;
    const DisturbVec w = random_disturbance(rng, box);
    std::vector<StateVec> refs(cfg.horizon);
    StateVec r = x0;
    for (auto& rr : refs) {
      r(0) += 0.01;
      rr = r;
    }
    Eigen::VectorXd u(3 * cfg.horizon);
    for (int k = 0; k < cfg.horizon; ++k) u.segment<3>(3 * k) = random_input(rng, cfg);

    const Eigen::VectorXd ga = nmpc.objective_gradient(u, x0, refs, u_prev, w);
    for (int c = 0; c < u.size(); ++c) {
      const double h = 1e-5 * std::max(1.0, std::abs(u(c)));
      Eigen::VectorXd up = u, dn = u;
      up(c) += h;
      dn(c) -= h;
      const double gf = (nmpc.objective(up, x0, refs, u_prev, w) -
                         nmpc.objective(dn, x0, refs, u_prev, w)) /
                        (2 * h);
      CHECK(std::abs(ga(c) - gf) <=
            1e-5 * std::max({1.0, std::abs(ga(c)), std::abs(gf)}));
    }
  }
}

TEST_CASE("nmhe: gradient matches central finite differences") {
  NmheConfig cfg;
  cfg.window = 15;
  NmpcConfig ctrl;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const DisturbVec w_true = random_disturbance(rng, cfg);
    const DisturbVec w_prev = random_disturbance(rng, cfg);
    std::vector<StateVec> ys{random_state(rng)};
    std::vector<InputVec> us;
    for (int k = 0; k < cfg.window; ++k) {
      us.push_back(random_input(rng, ctrl));
      ys.push_back(step_euler(cfg.model, ys.back(), us.back(), w_true, cfg.dt));
    }
    const DisturbVec w_eval = random_disturbance(rng, cfg);
    const DisturbVec ga = nmhe_gradient(w_eval, ys, us, w_prev, cfg);
    for (int c = 0; c < 8; ++c) {
      const double h = 1e-6;
      DisturbVec up = w_eval, dn = w_eval;
      up(c) += h;
      dn(c) -= h;
      const double gf =
          (nmhe_objective(up, ys, us, w_prev, cfg) - nmhe_objective(dn, ys, us, w_prev, cfg)) /
          (2 * h);
      CHECK(std::abs(ga(c) - gf) <=
            1e-5 * std::max({1.0, std::abs(ga(c)), std::abs(gf)}));
    }
  }
}

TEST_CASE("nmhe: zero-residual window and synthetic recovery") {
  NmheConfig cfg;
  NmpcConfig ctrl;
  const StateVec x0 = hover_state(geom::Vec3(0, 0, 0.5));

  // Nominal window: estimate stays at zero.
  std::vector<StateVec> ys{x0};
  std::vector<InputVec> us;
  for (int k = 0; k < cfg.window; ++k) {
    us.push_back(ctrl.u_nom);
    ys.push_back(step_euler(cfg.model, ys.back(), us.back(), DisturbVec::Zero(), cfg.dt));
  }
  const auto zero = nmhe_solve(ys, us, DisturbVec::Zero(), cfg);
  CHECK(zero.w.lpNorm<Eigen::Infinity>() < 1e-6);

  // Constant in-bounds truth. A cold solve (w_prev = 0) carries a Q_ch pull
  // toward zero worth ~1.6e-3 on a 0.3 m/s^2 component; the estimator runs
  // warm-started every tick, so the relevant figure is the fixed point,
  // where only the R_e pull remains (~1.5e-4 here).
  DisturbVec truth = DisturbVec::Zero();
  truth(3) = 0.15;
  truth(4) = 0.30;
  std::vector<StateVec> ys2{x0};
  std::vector<InputVec> us2;
  for (int k = 0; k < cfg.window; ++k) {
    us2.push_back(ctrl.u_nom);
    ys2.push_back(step_euler(cfg.model, ys2.back(), us2.back(), truth, cfg.dt));
  }
  auto est = nmhe_solve(ys2, us2, DisturbVec::Zero(), cfg);
  for (int rep = 0; rep < 5; ++rep) est = nmhe_solve(ys2, us2, est.w, cfg);
  double bias = 0;
  for (int c = 0; c < 8; ++c) bias = std::max(bias, std::abs(est.w(c) - truth(c)));
  MESSAGE("nmhe fixed-point regularization bias: ", bias);
  CHECK(bias < 1e-3);

  // Out-of-bounds truth clamps at the box.
  DisturbVec big = DisturbVec::Zero();
  big(4) = 0.9;
  std::vector<StateVec> ys3{x0};
  std::vector<InputVec> us3;
  for (int k = 0; k < cfg.window; ++k) {
    us3.push_back(ctrl.u_nom);
    ys3.push_back(step_euler(cfg.model, ys3.back(), us3.back(), big, cfg.dt));
  }
  const auto clamped = nmhe_solve(ys3, us3, DisturbVec::Zero(), cfg);
  CHECK(clamped.w(4) == doctest::Approx(0.6));
}

TEST_CASE("run_mission: offset-free hover under constant disturbance") {
  // Hold a fixed setpoint with w_v = (0, 0.3, 0): with the estimator on from
  // the start the planar error must fall under 2 cm well within 30 s.
  path::ReferenceStream stream;
  stream.sample_period = 0.05;
  const geom::Vec3 target(0.5, 0.5, 0.6);
  for (int k = 0; k < 600; ++k)
    stream.points.push_back({k * 0.05, target, true});

  ChunkMission m;
  m.chunk_id = 0;
  m.canister_use = 0;
  m.canister_volume_l = 4;
  m.stream = stream;

  PlantSpec plant;
  plant.constant(4) = 0.3;
  plant.ground_effect_gain = 0;
  plant.mass_ramp_peak = 0;

  MissionConfig mc;
  mc.home = target;  // no transit
  mc.estimator_enable_time = 0;

  const auto trace = run_mission({m}, plant, NmpcConfig{}, NmheConfig{}, mc, 1);
  REQUIRE(!trace.rows.empty());
  // Steady state: average planar error over the last 5 seconds.
  double err = 0;
  int n = 0;
  for (size_t k = trace.rows.size() - 100; k < trace.rows.size(); ++k) {
    err += (trace.rows[k].x.head<2>() - trace.rows[k].p_ref.head<2>()).norm();
    ++n;
  }
  err /= n;
  CHECK(err < 0.02);
  // And the estimate converged to the truth.
  CHECK(std::abs(trace.rows.back().w_hat(4) - 0.3) < 0.02);

  // Input feasibility over the whole trace.
  NmpcConfig cfg;
  InputVec prev = cfg.u_nom;
  for (const auto& row : trace.rows) {
    for (int c = 0; c < 3; ++c) {
      CHECK(row.u(c) >= cfg.u_min(c) - 1e-12);
      CHECK(row.u(c) <= cfg.u_max(c) + 1e-12);
    }
    CHECK(std::abs(row.u(1) - prev(1)) <= cfg.dphi_max + 1e-12);
    CHECK(std::abs(row.u(2) - prev(2)) <= cfg.dtheta_max + 1e-12);
    prev = row.u;
  }
}

TEST_CASE("run_mission: determinism and empty plan") {
  CHECK(run_mission({}, PlantSpec{}, NmpcConfig{}, NmheConfig{}, MissionConfig{}, 3)
            .rows.empty());

  path::ReferenceStream stream;
  stream.sample_period = 0.05;
  for (int k = 0; k < 100; ++k)
    stream.points.push_back({k * 0.05, geom::Vec3(0.01 * k, 0, 0.5), true});
  ChunkMission m;
  m.chunk_id = 0;
  m.stream = stream;
  PlantSpec plant;
  plant.process_noise_std = 0.01;
  plant.measurement_noise_std = 0.001;
  MissionConfig mc;
  mc.home = geom::Vec3(0, 0, 0.5);

  const auto a = run_mission({m}, plant, NmpcConfig{}, NmheConfig{}, mc, 42);
  const auto b = run_mission({m}, plant, NmpcConfig{}, NmheConfig{}, mc, 42);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].x == b.rows[k].x);
    CHECK(a.rows[k].u == b.rows[k].u);
    CHECK(a.rows[k].w_hat == b.rows[k].w_hat);
  }
}
