#include <cmath>
#include <random>

#include "doctest.h"
#include "flapsim/error.hpp"
#include "flapsim/gait.hpp"
#include "support.hpp"

using namespace flapsim;

TEST_CASE("sinusoid at t = 0") {
  GaitSchedule g;
  g.frequency_hz = 3.0;
  g.shoulder = {0.5, 0.2, 0.0};
  g.elbow = {0.0, 0.0, 0.0};
  const JointState js = gait_eval(g, 0.0);
  const double w = 2.0 * kPi * 3.0;
  CHECK(js.position[0] == doctest::Approx(0.2));
  CHECK(js.velocity[0] == doctest::Approx(w * 0.5));
  CHECK(js.acceleration[0] == doctest::Approx(0.0));
}

TEST_CASE("peak acceleration is (2 pi f)^2 A") {
  const GaitSchedule g = test::default_gait();
  const double w = 2.0 * kPi * g.frequency_hz;
  double peak_s = 0.0, peak_e = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const JointState js = gait_eval(g, i / (20000.0 * g.frequency_hz));
    peak_s = std::max(peak_s, std::abs(js.acceleration[0]));
    peak_e = std::max(peak_e, std::abs(js.acceleration[1]));
  }
  CHECK(peak_s == doctest::Approx(w * w * g.shoulder.amplitude_rad).epsilon(1e-6));
  CHECK(peak_e == doctest::Approx(w * w * g.elbow.amplitude_rad).epsilon(1e-6));
}

namespace {

// Central differences at 100 random times; errors relative to the peak value.
void check_derivatives(const GaitSchedule& g) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const double h = 1e-5;
  double scale_v = 0.0, scale_a = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const JointState js = gait_eval(g, i * 1e-3);
    scale_v = std::max(scale_v, js.velocity.cwiseAbs().maxCoeff());
    scale_a = std::max(scale_a, js.acceleration.cwiseAbs().maxCoeff());
  }
  double worst_v = 0.0, worst_a = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    const JointState mid = gait_eval(g, t);
    const JointState plus = gait_eval(g, t + h);
    const JointState minus = gait_eval(g, t - h);
    const Vec2 v = (plus.position - minus.position) / (2 * h);
    const Vec2 a = (plus.velocity - minus.velocity) / (2 * h);
    worst_v = std::max(worst_v, (v - mid.velocity).cwiseAbs().maxCoeff() / scale_v);
    worst_a = std::max(worst_a, (a - mid.acceleration).cwiseAbs().maxCoeff() / scale_a);
  }
  CHECK(worst_v < 1e-6);
  CHECK(worst_a < 1e-6);
}

}  // namespace

TEST_CASE("sinusoid derivatives agree with central differences") {
  check_derivatives(test::default_gait());
}

TEST_CASE("tabulated waveform") {
  const int n = 24;
  std::vector<double> s, e;
  for (int k = 0; k < n; ++k) {
    const double phase = 2.0 * kPi * k / n;
    s.push_back(0.1 + 0.6 * std::sin(phase) + 0.1 * std::sin(3 * phase));
    e.push_back(-0.4 + 0.4 * std::cos(phase));
  }
  GaitSchedule g;
  g.waveform = GaitSchedule::Waveform::tabulated;
  g.frequency_hz = 2.0;
  g.shoulder_table = TabulatedWave(s);
  g.elbow_table = TabulatedWave(e);
  CHECK_NOTHROW(validate(g));

  SUBCASE("interpolates the samples") {
    for (int k = 0; k < n; ++k) {
      const JointState js = gait_eval(g, k / (n * g.frequency_hz));
      CHECK(js.position[0] == doctest::Approx(s[k]).epsilon(1e-12));
      CHECK(js.position[1] == doctest::Approx(e[k]).epsilon(1e-12));
    }
  }
  SUBCASE("band-limited samples reproduce the underlying curve") {
    const double t = 0.123;
    const double phase = 2.0 * kPi * g.frequency_hz * t;
    const JointState js = gait_eval(g, t);
    CHECK(js.position[0] ==
          doctest::Approx(0.1 + 0.6 * std::sin(phase) + 0.1 * std::sin(3 * phase)));
  }
  SUBCASE("derivatives are consistent") { check_derivatives(g); }

  CHECK_THROWS_AS(TabulatedWave({0.1, 0.2}), ValidationError);
}

TEST_CASE("flap phase wraps each period") {
  const GaitSchedule g = test::default_gait();
  CHECK(flap_phase(g, 0.0) == doctest::Approx(0.0));
  CHECK(flap_phase(g, 0.125) == doctest::Approx(0.25));
  CHECK(flap_phase(g, 0.6) == doctest::Approx(0.2));
  CHECK(flap_phase(g, 0.6) < 1.0);
}
