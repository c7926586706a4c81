#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "flapsim/dynamics.hpp"
#include "flapsim/error.hpp"
#include "flapsim_oracles.hpp"
#include "support.hpp"

using namespace flapsim;

namespace {

void check_oracles(const std::vector<oracles::OracleResult>& results) {
  for (const auto& r : results) {
    INFO(r.name << " measured " << r.measured << " threshold " << r.threshold << " " << r.detail);
    CHECK(r.passed);
  }
}

Vec8 random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec8 q;
  q << u(rng), u(rng), u(rng), u(rng) * 3.0, u(rng) * 1.2, u(rng) * 3.0, u(rng), u(rng);
  return q;
}

SimOptions free_options(AeroModel aero = AeroModel::off, Vec3 wind = Vec3::Zero()) {
  return {Mode::free_flight, aero, wind, 0.1};
}

}  // namespace

TEST_CASE("mass matrix structure") {
  const RobotModel m = test::default_robot();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Mat8 M = mass_matrix(m, random_q(rng));
    CHECK(M.topLeftCorner<3, 3>().isApprox(m.total_mass_kg() * Mat3::Identity(), 1e-15));
    CHECK((M - M.transpose()).norm() == 0.0);
    CHECK(Eigen::LLT<Mat8>(M).info() == Eigen::Success);
  }
}

TEST_CASE("kinetic energy identity") { check_oracles(oracles::kinetic_energy(test::default_robot())); }

TEST_CASE("static bias force is gravity only") {
  const RobotModel m = test::default_robot();
  std::mt19937_64 rng(2);
  const Vec8 q = random_q(rng);
  const Vec8 h = bias_forces(m, q, Vec8::Zero());
  CHECK(h.head<3>().isApprox(Vec3(0, 0, -m.total_mass_kg() * m.gravity_mps2)));
  CHECK(h.isApprox(gravity_forces(m, ChainFrame(m, q))));
}

TEST_CASE("bias force matches the Lagrangian by finite differences") {
  // d/dt(M qd) - dT/dq = -h + dV/dq ... checked through energy balance:
  // power of the bias force (without gravity) vanishes.
  const RobotModel m = test::default_robot();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const Vec8 q = random_q(rng);
    Vec8 qd;
    for (int i = 0; i < 8; ++i) qd[i] = u(rng);
    const Vec8 coriolis = bias_forces(m, q, qd) - gravity_forces(m, ChainFrame(m, q));
    // qd^T (Mdot qd - 1/2 dT) = 1/2 qd^T Mdot qd, hence qd.h_c = -1/2 qd^T Mdot qd.
    const double h = 1e-6;
    const Mat8 Mdot = (mass_matrix(m, Vec8(q + h * qd)) - mass_matrix(m, Vec8(q - h * qd))) / (2 * h);
    const double expected = -0.5 * qd.dot(Mdot * qd);
    CHECK(qd.dot(coriolis) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("free fall") { check_oracles(oracles::free_fall(test::default_robot())); }

TEST_CASE("energy conservation with frozen gait") { check_oracles(oracles::energy(test::default_robot())); }

TEST_CASE("constrained acceleration solve") {
  SUBCASE("one-dof toy") {
    MatX M(1, 1), J(1, 1);
    M << 1.0;
    J << 1.0;
    const auto r = solve_constrained_accel(M, VecX::Zero(1), J, VecX::Constant(1, 2.0));
    CHECK(r.lambda[0] == doctest::Approx(2.0));
    CHECK(r.qdd[0] == doctest::Approx(2.0));
    CHECK(r.residual < 1e-15);
  }
  SUBCASE("inactive constraint gives zero multiplier") {
    const RobotModel m = test::default_robot();
    std::mt19937_64 rng(4);
    const Vec8 q = random_q(rng);
    EomTerms t;
    t.M = mass_matrix(m, q);
    t.h = bias_forces(m, q, Vec8::Zero());
    t.Jc = joint_selector();
    Vec8 target = Vec8::Zero();
    target << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 1.5, -2.0;
    t.u_a = t.M * target - t.h;
    const auto r = solve_constrained_accel(t, target.tail<2>());
    CHECK(r.lambda.norm() < 1e-12);
    CHECK((r.qdd - target).norm() < 1e-10);
  }
  SUBCASE("residual on the full model") {
    const RobotModel m = test::default_robot();
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
      const Vec8 q = random_q(rng);
      EomTerms t;
      t.M = mass_matrix(m, q);
      t.h = bias_forces(m, q, Vec8::Constant(0.7));
      t.Jc = joint_selector();
      const auto r = solve_constrained_accel(t, Vec2(40.0, -25.0));
      CHECK(r.residual < 1e-9);
    }
  }
  SUBCASE("degenerate inputs") {
    MatX M = MatX::Identity(2, 2);
    MatX J(2, 2);
    J << 1, 0, 1, 0;
    CHECK_THROWS_AS(solve_constrained_accel(M, VecX::Zero(2), J, VecX::Zero(2)), ConstraintError);
    MatX bad(2, 2);
    bad << 1, 0, 0, -1;
    MatX J1(1, 2);
    J1 << 1, 0;
    CHECK_THROWS_AS(solve_constrained_accel(bad, VecX::Zero(2), J1, VecX::Zero(1)), ConstraintError);
  }
  SUBCASE("prescribed two-link pendulum vs minimal coordinates") { check_oracles(oracles::pendulum()); }
}

TEST_CASE("tethered mode advances only joints and wake") {
  const RobotModel m = test::default_robot();
  Simulator sim(m, test::default_gait(), {Mode::tethered, AeroModel::unsteady, headwind(1.0), 0.1});
  FullState s = sim.initial_state({Vec3(0.1, 0.2, 0.3), Vec3(0.0, -0.17, 0.2), Vec3(1, 1, 1), Vec3(1, 1, 1)});
  const Vec8 q0 = s.gen.q;
  CHECK(s.gen.qd.head<6>().isZero());
  for (int n = 0; n < 200; ++n) sim.step(s, {}, 5e-4);
  CHECK(s.gen.q.head<6>() == q0.head<6>());
  CHECK(s.gen.qd.head<6>().isZero());
  CHECK(s.gen.q[coord::kShoulder] != q0[coord::kShoulder]);
  CHECK(s.aero.a.norm() > 0.0);
  CHECK(s.aero.z1.norm() > 0.0);
}

TEST_CASE("tethered reaction balances weight when nothing moves") {
  const RobotModel m = test::default_robot();
  Simulator sim(m, test::frozen_gait(), {Mode::tethered, AeroModel::off, Vec3::Zero(), 0.1});
  const FullState s = sim.initial_state({});
  const Evaluation ev = sim.evaluate(s);
  CHECK(ev.mount_force_n.isApprox(Vec3(0, 0, m.total_mass_kg() * m.gravity_mps2)));
}

TEST_CASE("joints track the gait and the constraint holds in free flight") {
  const RobotModel m = test::default_robot();
  const GaitSchedule g = test::default_gait();
  Simulator sim(m, g, free_options(AeroModel::unsteady, headwind(1.0)));
  FullState s = sim.initial_state({});
  // Without the stabilizer the body pitches over within about half a second.
  for (int n = 1; n <= 400; ++n) {
    const Evaluation ev = sim.step(s, {}, 5e-4, n * 5e-4);
    CHECK(ev.constraint_residual < 1e-6);
    CHECK(ev.collocation_residual < 1e-10);
  }
  const JointState js = gait_eval(g, s.time);
  CHECK(s.gen.q.tail<2>() == js.position);
  CHECK(sim.max_constraint_residual() < 1e-6);
}

TEST_CASE("RK4 self-convergence order") {
  const RobotModel m = test::default_robot();
  const GaitSchedule g = test::default_gait();
  const auto run = [&](double dt) {
    Simulator sim(m, g, free_options());
    FullState s = sim.initial_state({Vec3::Zero(), Vec3(0.1, -0.1, 0.0), Vec3(0.5, 0.0, 1.0),
                                     Vec3(1.0, 2.0, 3.0)});
    const int steps = static_cast<int>(std::llround(0.5 / dt));
    for (int n = 1; n <= steps; ++n) sim.step(s, {}, dt, n * dt);
    return Vec8(s.gen.q);
  };
  const Vec8 ref = run(2.5e-4);
  const double e1 = (run(1e-2) - ref).norm();
  const double e2 = (run(5e-3) - ref).norm();
  const double order = std::log2(e1 / e2);
  INFO("errors " << e1 << " " << e2);
  CHECK(order >= 3.5);
}

TEST_CASE("non-finite state raises a divergence error") {
  const RobotModel m = test::default_robot();
  Simulator sim(m, test::default_gait(), free_options(AeroModel::unsteady, headwind(1.0)));
  FullState s = sim.initial_state({});
  s.aero.z1[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    sim.step(s, {}, 1e-3);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() == 0.0);
    CHECK(e.component() == "z1[3]");
  }
}

TEST_CASE("pack and unpack are inverse") {
  const RobotModel m = test::default_robot();
  Simulator sim(m, test::default_gait(), free_options());
  FullState s = sim.initial_state({Vec3(1, 2, 3), Vec3(0.1, 0.2, 0.3), Vec3(4, 5, 6), Vec3(7, 8, 9)});
  s.aero.a.setLinSpaced(16, -1.0, 1.0);
  s.aero.z2.setConstant(0.25);
  const VecX x = sim.pack(s);
  CHECK(x.size() == 16 + 3 * 16);
  FullState back;
  sim.unpack(x, back);
  CHECK(sim.pack(back) == x);
  CHECK(sim.component_name(0) == "q.x");
  CHECK(sim.component_name(15) == "qd.q_e");
  CHECK(sim.component_name(16 + 16 + 2) == "z1[2]");
}

TEST_CASE("independent energy agrees with the library energy") {
  const RobotModel m = test::default_robot();
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    GeneralizedState s{random_q(rng), Vec8::Constant(0.3)};
    CHECK(total_energy(m, s) == doctest::Approx(oracles::independent_energy(m, s)).epsilon(1e-7));
  }
}
