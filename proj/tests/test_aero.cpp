#include <cmath>
#include <random>

#include "doctest.h"
#include "flapsim/aero.hpp"
#include "flapsim/error.hpp"
#include "flapsim/integrator.hpp"
#include "flapsim/kinematics.hpp"
#include "flapsim_oracles.hpp"
#include "support.hpp"

using namespace flapsim;

namespace {

std::vector<double> stations(int m) {
  std::vector<double> th;
  for (int i = 1; i <= m; ++i) th.push_back(i * kPi / (m + 1));
  return th;
}

LiftingLine rectangular(int m, double c0 = 0.08, double span = 0.3) {
  return LiftingLine(stations(m), std::vector<double>(m, c0), c0, span, 2.0 * kPi);
}

void check_oracles(const std::vector<oracles::OracleResult>& results) {
  for (const auto& r : results) {
    INFO(r.name << " measured " << r.measured << " threshold " << r.threshold << " " << r.detail);
    CHECK(r.passed);
  }
}

}  // namespace

TEST_CASE("wagner function") {
  CHECK(wagner_phi(0.0) == 0.5);
  CHECK(WagnerConstants{}.phi0() == 0.5);
  CHECK(wagner_phi(1.0) == doctest::Approx(0.59417).epsilon(1e-5));
  CHECK(wagner_phi(1e6) > 1.0 - 1e-6);
  CHECK(wagner_phi(1e6) <= 1.0);
  CHECK_THROWS_AS(wagner_phi(-1e-9), ValidationError);
  CHECK_THROWS_AS(wagner_phi(std::nan("")), ValidationError);
  check_oracles(oracles::wagner());
}

TEST_CASE("induced downwash") {
  const double a0 = 2.0 * kPi, c0 = 0.08, S = 0.3, U = 2.0;
  const LiftingLine ll = rectangular(3, c0, S);  // theta_2 = pi/2
  const double k = a0 * c0 * U / (4 * S);

  CHECK(ll.induced_downwash(VecX::Zero(3), U).isZero());

  VecX a = VecX::Zero(3);
  a[0] = 0.05;
  CHECK(ll.induced_downwash(a, U)[1] == doctest::Approx(-k * 0.05));

  a.setZero();
  a[1] = 0.05;
  CHECK(std::abs(ll.induced_downwash(a, U)[1]) < 1e-16);

  CHECK_THROWS_AS(ll.induced_downwash(a, 0.0), FreestreamError);
  CHECK_THROWS_AS(ll.induced_downwash(a, -1.0), FreestreamError);
}

TEST_CASE("memory states") {
  const VecX b = VecX::Constant(3, 0.02);
  const WagnerConstants k;

  SUBCASE("equilibrium at zero") {
    const MemoryStates z{VecX::Zero(3), VecX::Zero(3)};
    const MemoryStates next = advance_memory_states(z, VecX::Zero(3), 1.0, b, 1e-3);
    CHECK(next.z1.isZero());
    CHECK(next.z2.isZero());
  }
  SUBCASE("constant downwash settles to psi W and recovers the steady lift") {
    const VecX W = VecX::Constant(3, 0.3);
    MemoryStates z{VecX::Zero(3), VecX::Zero(3)};
    const double U = 1.0;
    for (int n = 0; n < 20000; ++n) z = advance_memory_states(z, W, U, b, 1e-3);
    CHECK((z.z1 - k.psi1 * W).norm() < 1e-12);
    CHECK((z.z2 - k.psi2 * W).norm() < 1e-12);
    const VecX cl = sectional_lift(W, z.z1, z.z2, U, 2.0 * kPi);
    CHECK(cl[0] == doctest::Approx(2.0 * kPi * 0.3 / U));
  }
  SUBCASE("linear in the downwash history") {
    const auto w = [](double t) { return VecX::Constant(3, std::sin(5.0 * t) + 0.2); };
    const auto w2 = [&w](double t) { return VecX(2.0 * w(t)); };
    MemoryStates z{VecX::Zero(3), VecX::Zero(3)}, z2 = z;
    for (int n = 0; n < 2000; ++n) {
      z = advance_memory_states(z, w, n * 1e-3, 1.5, b, 1e-3);
      z2 = advance_memory_states(z2, w2, n * 1e-3, 1.5, b, 1e-3);
    }
    CHECK((z2.z1 - 2.0 * z.z1).norm() <= 1e-15 * z.z1.norm());
    CHECK((z2.z2 - 2.0 * z.z2).norm() <= 1e-15 * z.z2.norm());
  }
  SUBCASE("rates follow the corrected Leibniz form") {
    const MemoryStates z{VecX::Constant(3, 0.01), VecX::Constant(3, -0.02)};
    const VecX w = VecX::Constant(3, 0.1);
    const MemoryStates r = memory_rates(z, w, 2.0, b);
    const double s1 = k.eps1 * 2.0 / 0.02, s2 = k.eps2 * 2.0 / 0.02;
    CHECK(r.z1[0] == doctest::Approx(k.psi1 * s1 * 0.1 - s1 * 0.01));
    CHECK(r.z2[0] == doctest::Approx(k.psi2 * s2 * 0.1 + s2 * 0.02));
  }
  SUBCASE("quadrature of the convolution integral") { check_oracles(oracles::memory_quadrature()); }
}

TEST_CASE("sectional lift") {
  const VecX W = VecX::Constant(2, 0.2);
  const VecX zero = VecX::Zero(2);
  const double a0 = 2.0 * kPi, U = 3.0;
  CHECK(sectional_lift(zero, zero, zero, U, a0).isZero());
  const VecX steady = sectional_lift(W, 0.165 * W, 0.335 * W, U, a0);
  CHECK(steady[0] == doctest::Approx(a0 * 0.2 / U));
  const VecX impulsive = sectional_lift(W, zero, zero, U, a0);
  CHECK(impulsive[0] == 0.5 * steady[0]);
}

TEST_CASE("fourier rate solve") {
  SUBCASE("homogeneous system") {
    const LiftingLine ll = rectangular(8);
    CHECK(ll.fourier_rates(VecX::Zero(8), VecX::Zero(8), 2.0).isZero());
  }
  SUBCASE("single element closed form") {
    const double c0 = 0.08, c1 = 0.05, a0 = 5.5, U = 1.7, th = kPi / 2;
    const LiftingLine ll({th}, {c1}, c0, 0.3, a0);
    const double a = 0.03, w = 0.2, z1 = 0.01, z2 = -0.02;
    const double cl = (a0 / U) * (0.5 * w + z1 + z2);
    const double expected = (U / (a0 * c0 * std::sin(th))) * (cl - a0 * (c0 / c1) * a * std::sin(th));
    const VecX adot = ll.fourier_rates(VecX::Constant(1, a), VecX::Constant(1, cl), U);
    CHECK(adot[0] == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("collocation residual is tiny") {
    const RobotModel m = test::default_robot();
    const LiftingLine ll(m, element_stations(m));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      VecX a(16), cl(16);
      for (int i = 0; i < 16; ++i) {
        a[i] = 0.05 * u(rng);
        cl[i] = u(rng);
      }
      const VecX adot = ll.fourier_rates(a, cl, 1.3);
      CHECK(ll.collocation_residual(a, adot, cl, 1.3) < 1e-10);
      CHECK((ll.fourier_lift(a, adot, 1.3) - cl).norm() < 1e-10 * cl.norm());
    }
  }
  SUBCASE("coincident stations are singular") {
    CHECK_THROWS_AS(LiftingLine({0.5, 0.5}, {0.08, 0.08}, 0.08, 0.3, 2 * kPi), CollocationError);
  }
}

TEST_CASE("elliptic wing reaches the classical lifting-line lift") {
  check_oracles(oracles::elliptic_lifting_line());
}

TEST_CASE("quasi-steady baseline") {
  const RobotModel m = test::default_robot();
  SUBCASE("no normal flow, no lift") {
    const auto el = blade_elements(m, GeneralizedState{}, headwind(1.0));
    CHECK(quasi_steady_baseline(el, m).isZero());
  }
  SUBCASE("small-angle limit") {
    GeneralizedState s;
    s.q[coord::kPitch] = -0.01;  // nose up
    const auto el = blade_elements(m, s, headwind(2.0));
    const VecX cl = quasi_steady_baseline(el, m);
    for (std::size_t i = 0; i < el.size(); ++i) {
      CHECK(cl[i] > 0.0);
      CHECK(cl[i] == doctest::Approx(m.lift_slope_per_rad * el[i].v_n / el[i].v_e).epsilon(1e-4));
    }
  }
}

TEST_CASE("force assembly") {
  RobotModel m = test::default_robot();

  SUBCASE("zero lift and no profile drag give zero generalized force") {
    m.profile_drag_coeff = 0.0;
    const auto el = blade_elements(m, GeneralizedState{}, headwind(1.0));
    const auto f = assemble_forces(VecX::Zero(16), el, m);
    CHECK(f.generalized.isZero());
  }
  SUBCASE("headwind lift points up and maps straight to p") {
    m.profile_drag_coeff = 0.0;
    auto el = blade_elements(m, GeneralizedState{}, headwind(2.0));
    el.resize(1);
    const auto f = assemble_forces(VecX::Constant(1, 0.4), el, m);
    const auto& st = el[0].station;
    const double expected = 0.5 * m.air_density_kgm3 * 4.0 * st.chord_m * st.width_m * 0.4;
    CHECK(f.force[0].isApprox(Vec3(0, 0, expected)));
    CHECK(f.generalized.head<3>().isApprox(f.force[0]));
  }
  SUBCASE("profile drag acts along the flow") {
    auto el = blade_elements(m, GeneralizedState{}, headwind(2.0));
    const auto f = assemble_forces(VecX::Zero(16), el, m);
    for (const auto& v : f.force) {
      CHECK(v.x() < 0.0);
      CHECK(std::abs(v.z()) < 1e-18);
    }
  }
  SUBCASE("induced downwash tilts lift backwards") {
    m.profile_drag_coeff = 0.0;
    auto el = blade_elements(m, GeneralizedState{}, headwind(2.0));
    const VecX cl = VecX::Constant(16, 0.5);
    const VecX wy = VecX::Constant(16, -0.1);
    const auto plain = assemble_forces(cl, el, m);
    const auto tilted = assemble_forces(cl, el, m, wy);
    const double angle = std::atan2(0.1, 2.0);
    CHECK(tilted.force[3].norm() == doctest::Approx(plain.force[3].norm()));
    CHECK(tilted.force[3].x() == doctest::Approx(-plain.force[3].z() * std::sin(angle)));
  }
  SUBCASE("symmetric wings in symmetric flow: no roll or yaw") {
    GeneralizedState s;
    s.q[coord::kPitch] = -0.1;
    s.q[coord::kShoulder] = 0.4;
    s.q[coord::kElbow] = -0.3;
    s.qd[coord::kShoulder] = 1.5;
    s.qd[coord::kElbow] = -0.7;
    s.qd[coord::kPx] = 0.2;
    const auto el = blade_elements(m, s, Vec3(-1.0, 0.0, 0.3));
    const auto f = assemble_forces(quasi_steady_baseline(el, m), el, m);
    const double scale = f.generalized.norm();
    CHECK(std::abs(f.generalized[coord::kRoll]) < 1e-14 * scale);
    CHECK(std::abs(f.generalized[coord::kYaw]) < 1e-14 * scale);
    CHECK(std::abs(f.generalized[coord::kPy]) < 1e-14 * scale);
  }
  SUBCASE("mirrored state and wind mirror the generalized force") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GeneralizedState s;
    for (int i = 0; i < 8; ++i) {
      s.q[i] = 0.5 * u(rng);
      s.qd[i] = u(rng);
    }
    GeneralizedState ms = s;
    for (int i : {coord::kPy, coord::kRoll, coord::kYaw}) {
      ms.q[i] = -s.q[i];
      ms.qd[i] = -s.qd[i];
    }
    const Vec3 wind(-1.0, 0.4, 0.2);
    const auto a = blade_elements(m, s, wind);
    const auto b = blade_elements(m, ms, Vec3(-1.0, -0.4, 0.2));
    const Vec8 ua = assemble_forces(quasi_steady_baseline(a, m), a, m).generalized;
    const Vec8 ub = assemble_forces(quasi_steady_baseline(b, m), b, m).generalized;
    Vec8 flip = Vec8::Ones();
    flip[coord::kPy] = flip[coord::kRoll] = flip[coord::kYaw] = -1.0;
    CHECK((ub - flip.asDiagonal() * ua).norm() < 1e-14 * ua.norm());
  }
  SUBCASE("virtual work") { check_oracles(oracles::jacobians(m, 100)); }
}
