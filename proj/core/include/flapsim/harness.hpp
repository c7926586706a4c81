#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flapsim/dynamics.hpp"
#include "flapsim/gait.hpp"
#include "flapsim/model.hpp"
#include "flapsim/scenario.hpp"

namespace flapsim {

struct TraceRecord {
  double time_s = 0.0;
  double flap_phase = 0.0;
  Vec8 q = Vec8::Zero();
  Vec8 qd = Vec8::Zero();
  double lift_left_n = 0.0, lift_right_n = 0.0;
  double drag_left_n = 0.0, drag_right_n = 0.0;
  Vec3 mount_force_n = Vec3::Zero();
  Vec3 mount_torque_nm = Vec3::Zero();
  Vec2 lambda = Vec2::Zero();
  double thrust_total_n = 0.0;
};

struct RunSummary {
  Mode mode = Mode::tethered;
  AeroModel aero_model = AeroModel::unsteady;
  double wind_speed_mps = 0.0;
  double flap_frequency_hz = 0.0;
  int steps = 0;
  int rows = 0;
  double final_time_s = 0.0;
  int cycles_averaged = 0;
  /// Cycle-averaged total aerodynamic lift (vertical) and drag (along the wind).
  double mean_lift_n = 0.0;
  double mean_drag_n = 0.0;
  Vec3 mean_mount_force_n = Vec3::Zero();
  double max_constraint_residual = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Applies the seeded mass perturbation of `scenario`, if any.
RobotModel perturbed_model(const RobotModel& model, const ScenarioConfig& scenario);

/// Runs one scenario, emitting a record every `decimation` steps (the initial
/// state is not emitted). Cycle averages skip `transient_cycles` flaps.
RunSummary run_scenario(const RobotModel& model, const GaitSchedule& gait,
                        const ScenarioConfig& scenario, const TraceSink& sink = {});

struct SweepPoint {
  double wind_speed_mps = 0.0;
  double flap_frequency_hz = 0.0;
  std::optional<RunSummary> unsteady;
  std::optional<RunSummary> quasi_steady;
  std::string error;  // empty when both runs succeeded
};

struct SweepResult {
  std::vector<SweepPoint> points;  // wind-major grid order
};

/// Runs every (wind, frequency) grid point with both aerodynamic models.
/// Failures are recorded per point; `jobs` > 1 runs points concurrently.
SweepResult sweep(const RobotModel& model, const GaitSchedule& gait,
                  const ScenarioConfig& scenario, int jobs = 1);

/// Column names of the trace CSV, in order.
const std::vector<std::string>& trace_columns();
std::string trace_csv_row(const TraceRecord& record);
std::string trace_csv_header();
std::string sweep_csv(const SweepResult& result);
nlohmann::json summary_json(const RunSummary& summary);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace flapsim
