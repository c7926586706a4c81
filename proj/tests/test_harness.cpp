#include <charconv>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "flapsim/harness.hpp"
#include "support.hpp"

using namespace flapsim;

namespace {

std::string run_to_csv(const RobotModel& m, const GaitSchedule& g, const ScenarioConfig& s,
                       RunSummary* summary = nullptr) {
  std::ostringstream out;
  out << trace_csv_header() << "\n";
  const RunSummary r = run_scenario(m, g, s, [&out](const TraceRecord& rec) {
    out << trace_csv_row(rec) << "\n";
  });
  if (summary) *summary = r;
  return out.str();
}

ScenarioConfig short_tethered(double duration = 3.0) {
  ScenarioConfig s = test::tethered_scenario();
  s.duration_s = duration;
  s.transient_cycles = 2;
  return s;
}

}  // namespace

TEST_CASE("zero-amplitude gait, no wind: mount carries the weight only") {
  const RobotModel m = test::default_robot();
  ScenarioConfig s = short_tethered(0.5);
  s.aero_model = AeroModel::quasi_steady;
  s.wind_mps = Vec3::Zero();
  s.initial.attitude_rad = Vec3::Zero();
  std::vector<TraceRecord> rows;
  run_scenario(m, test::frozen_gait(), s, [&rows](const TraceRecord& r) { rows.push_back(r); });
  REQUIRE(!rows.empty());
  const Vec3 weight(0, 0, m.total_mass_kg() * m.gravity_mps2);
  for (const auto& r : rows) {
    CHECK((r.mount_force_n - weight).norm() < 1e-12);
    CHECK(r.mount_force_n == rows.front().mount_force_n);
    CHECK(r.lift_left_n == 0.0);
  }
}

TEST_CASE("tethered flapping is periodic at the flap period") {
  const RobotModel m = test::default_robot();
  const GaitSchedule g = test::default_gait();
  const ScenarioConfig s = short_tethered(4.0);
  std::vector<double> t, lift;
  run_scenario(m, g, s, [&](const TraceRecord& r) {
    if (r.time_s > 1.5) {
      t.push_back(r.time_s);
      lift.push_back(r.lift_left_n + r.lift_right_n);
    }
  });
  double mean = 0.0;
  for (double v : lift) mean += v;
  mean /= lift.size();
  const double row_dt = s.dt_s * s.decimation;
  int best_lag = 0;
  double best = -1e300;
  for (int lag = static_cast<int>(0.3 / row_dt); lag <= static_cast<int>(0.7 / row_dt); ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < lift.size(); ++i) acc += (lift[i] - mean) * (lift[i + lag] - mean);
    acc /= static_cast<double>(lift.size() - lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag * row_dt == doctest::Approx(1.0 / g.frequency_hz).epsilon(1e-9));
}

TEST_CASE("runs are deterministic to the byte") {
  const RobotModel m = test::default_robot();
  ScenarioConfig s = short_tethered(1.0);
  s.mass_perturbation = 0.05;
  s.seed = 42;
  const std::string a = run_to_csv(m, test::default_gait(), s);
  const std::string b = run_to_csv(m, test::default_gait(), s);
  CHECK(a == b);
  s.seed = 43;
  CHECK(run_to_csv(m, test::default_gait(), s) != a);
}

TEST_CASE("row count, decimation and time ordering") {
  const RobotModel m = test::default_robot();
  const ScenarioConfig s = short_tethered(1.0);
  std::vector<TraceRecord> rows;
  const RunSummary sum =
      run_scenario(m, test::default_gait(), s, [&rows](const TraceRecord& r) { rows.push_back(r); });
  CHECK(rows.size() == 200);
  CHECK(sum.rows == 200);
  CHECK(sum.steps == 2000);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].time_s == doctest::Approx((i + 1) * s.dt_s * s.decimation).epsilon(1e-14));
    if (i > 0) CHECK(rows[i].time_s > rows[i - 1].time_s);
  }
}

TEST_CASE("tethered force balance: mount z = weight - lift over whole cycles") {
  const RobotModel m = test::default_robot();
  const RunSummary r = run_scenario(m, test::default_gait(), short_tethered(3.0));
  CHECK(r.cycles_averaged == 4);  // 3 s at 2 Hz minus two transient cycles
  const double weight = m.total_mass_kg() * m.gravity_mps2;
  CHECK(r.mean_mount_force_n.z() == doctest::Approx(weight - r.mean_lift_n).epsilon(1e-9));
  CHECK(r.mean_lift_n > 0.0);
}

TEST_CASE("sweep") {
  const RobotModel m = test::default_robot();
  const GaitSchedule g = test::default_gait();
  ScenarioConfig s = short_tethered(3.0);

  SUBCASE("single point equals a plain run") {
    s.sweep.wind_mps = {1.2};
    s.sweep.flap_frequency_hz = {2.5};
    const SweepResult res = sweep(m, g, s);
    REQUIRE(res.points.size() == 1);
    ScenarioConfig one = s;
    one.wind_mps = headwind(1.2);
    GaitSchedule g2 = g;
    g2.frequency_hz = 2.5;
    const RunSummary direct = run_scenario(m, g2, one);
    CHECK(res.points[0].unsteady->mean_lift_n == direct.mean_lift_n);
    CHECK(res.points[0].unsteady->mean_drag_n == direct.mean_drag_n);
  }
  SUBCASE("permuting the grid permutes the rows") {
    s.sweep.wind_mps = {0.5, 1.5};
    s.sweep.flap_frequency_hz = {2.0, 3.0};
    const SweepResult a = sweep(m, g, s, 1);
    s.sweep.wind_mps = {1.5, 0.5};
    s.sweep.flap_frequency_hz = {3.0, 2.0};
    const SweepResult b = sweep(m, g, s, 3);
    REQUIRE(a.points.size() == 4);
    for (const auto& pa : a.points) {
      int matches = 0;
      for (const auto& pb : b.points) {
        if (pa.wind_speed_mps == pb.wind_speed_mps && pa.flap_frequency_hz == pb.flap_frequency_hz) {
          ++matches;
          CHECK(pa.unsteady->mean_lift_n == pb.unsteady->mean_lift_n);
          CHECK(pa.quasi_steady->mean_lift_n == pb.quasi_steady->mean_lift_n);
        }
      }
      CHECK(matches == 1);
    }
    CHECK(b.points[0].wind_speed_mps == 1.5);
    CHECK(b.points[0].flap_frequency_hz == 3.0);
  }
  SUBCASE("failed points are recorded and the sweep continues") {
    s.sweep.wind_mps = {0.0, 1.0};
    s.sweep.flap_frequency_hz = {2.0};
    const SweepResult res = sweep(m, g, s, 2);
    REQUIRE(res.points.size() == 2);
    CHECK(!res.points[0].error.empty());
    CHECK(res.points[1].error.empty());
    CHECK(res.points[1].unsteady.has_value());
    const std::string csv = sweep_csv(res);
    CHECK(csv.find("wind_mps") != std::string::npos);
    CHECK(csv.find("floor") != std::string::npos);
  }
}

TEST_CASE("unsteady and quasi-steady models differ at 2 Hz") {
  const RobotModel m = test::default_robot();
  ScenarioConfig s = short_tethered(3.0);
  const RunSummary u = run_scenario(m, test::default_gait(), s);
  s.aero_model = AeroModel::quasi_steady;
  const RunSummary q = run_scenario(m, test::default_gait(), s);
  CHECK(std::abs(u.mean_lift_n - q.mean_lift_n) / std::abs(q.mean_lift_n) > 0.01);
}

TEST_CASE("csv formatting") {
  CHECK(trace_columns().size() == 31);
  CHECK(trace_csv_header().rfind("time_s,flap_phase,x_m", 0) == 0);
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, 123456789.125}) {
    const std::string text = format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");

  TraceRecord r;
  r.time_s = 0.5;
  const std::string row = trace_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 30);
  CHECK(row.rfind("0.5,", 0) == 0);
}

TEST_CASE("summary json") {
  const RobotModel m = test::default_robot();
  const RunSummary r = run_scenario(m, test::default_gait(), short_tethered(1.0));
  const auto j = summary_json(r);
  CHECK(j["mode"] == "tethered");
  CHECK(j["aero_model"] == "unsteady");
  CHECK(j["rows"] == 200);
  CHECK(j["mean_mount_force_n"].size() == 3);
}

TEST_CASE("guard-stabilized flight holds attitude") {
  const RobotModel m = test::default_robot();
  ScenarioConfig s = load_scenario(test::data_path("scenario_guard.json"));
  s.duration_s = 3.0;
  double worst_roll = 0.0, last_roll = 1.0, thrust = 0.0;
  run_scenario(m, test::default_gait(), s, [&](const TraceRecord& r) {
    worst_roll = std::max(worst_roll, std::abs(r.q[coord::kRoll]));
    last_roll = r.q[coord::kRoll];
    thrust = r.thrust_total_n;
  });
  CHECK(worst_roll < 0.1);
  CHECK(std::abs(last_roll) < 0.01);
  CHECK(thrust > 0.0);
}
