#include "flapsim/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "flapsim/error.hpp"

namespace flapsim {

RobotModel perturbed_model(const RobotModel& model, const ScenarioConfig& scenario) {
  if (scenario.mass_perturbation <= 0.0) return model;
  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> factor(1.0 - scenario.mass_perturbation,
                                                1.0 + scenario.mass_perturbation);
  RobotModel out = model;
  auto scale = [&](double& mass, Mat3& inertia) {
    const double f = factor(rng);
    mass *= f;
    inertia *= f;
  };
  scale(out.body_mass_kg, out.body_inertia_kgm2);
  scale(out.proximal.mass_kg, out.proximal.inertia_kgm2);
  scale(out.distal.mass_kg, out.distal.inertia_kgm2);
  return out;
}

namespace {

StabilizerMeasurement measure(const FullState& s) {
  const Vec8& q = s.gen.q;
  const Vec8& qd = s.gen.qd;
  const double yaw = q[coord::kYaw];
  StabilizerMeasurement m;
  m.roll_rad = q[coord::kRoll];
  m.pitch_rad = -q[coord::kPitch];
  m.roll_rate_radps = qd[coord::kRoll];
  m.pitch_rate_radps = -qd[coord::kPitch];
  m.vx_mps = std::cos(yaw) * qd[0] + std::sin(yaw) * qd[1];
  m.vy_mps = -std::sin(yaw) * qd[0] + std::cos(yaw) * qd[1];
  return m;
}

TraceRecord make_record(const FullState& s, const Evaluation& ev, const GaitSchedule& gait,
                        const ThrusterCommand& cmd) {
  TraceRecord r;
  r.time_s = s.time;
  r.flap_phase = flap_phase(gait, s.time);
  r.q = s.gen.q;
  r.qd = s.gen.qd;
  r.lift_left_n = ev.lift_left_n;
  r.lift_right_n = ev.lift_right_n;
  r.drag_left_n = ev.drag_left_n;
  r.drag_right_n = ev.drag_right_n;
  r.mount_force_n = ev.mount_force_n;
  r.mount_torque_nm = ev.mount_torque_nm;
  r.lambda = ev.lambda;
  for (double t : cmd.thrust_n) r.thrust_total_n += t;
  return r;
}

}  // namespace

RunSummary run_scenario(const RobotModel& model, const GaitSchedule& gait,
                        const ScenarioConfig& scenario, const TraceSink& sink) {
  validate(scenario);
  const SimOptions options{scenario.mode, scenario.aero_model, scenario.wind_mps,
                           scenario.freestream_floor_mps};
  Simulator sim(perturbed_model(model, scenario), gait, options);
  FullState state = sim.initial_state(scenario.initial);
  const double start = state.time;

  const double dt = scenario.dt_s;
  const auto steps = static_cast<int>(std::llround(scenario.duration_s / dt));

  std::optional<Mixer> mixer;
  CascadeState controller_state;
  if (scenario.mode == Mode::guard_stabilized) mixer.emplace(sim.model().thrusters);

  // Averaging window: whole flap cycles after the transient.
  RunSummary summary;
  summary.mode = scenario.mode;
  summary.aero_model = scenario.aero_model;
  summary.wind_speed_mps = scenario.wind_mps.norm();
  summary.flap_frequency_hz = gait.frequency_hz;
  const double horizon = steps * dt;
  double window_start = 0.0;
  double window_end = horizon;
  if (gait.frequency_hz > 0.0) {
    const double period = 1.0 / gait.frequency_hz;
    window_start = scenario.transient_cycles * period;
    const double available = (horizon - window_start) / period;
    summary.cycles_averaged = available > 0.0 ? static_cast<int>(std::floor(available + 1e-9)) : 0;
    if (summary.cycles_averaged > 0) {
      window_end = window_start + summary.cycles_averaged * period;
    } else {
      window_start = 0.0;
    }
  }
  const double eps = 1e-9 * dt;
  double lift_sum = 0.0, drag_sum = 0.0;
  Vec3 mount_sum = Vec3::Zero();
  long samples = 0;

  ThrusterCommand command;
  for (int k = 1; k <= steps; ++k) {
    if (mixer) {
      const auto out =
          cascade(scenario.controller, measure(state), scenario.setpoint, dt, controller_state);
      controller_state = out.state;
      command = mixer->mix(body_request(out)).command;
    }
    const double t_prev = state.time;
    const Evaluation ev = sim.step(state, command, dt, start + k * dt);
    if (t_prev >= window_start - eps && t_prev < window_end - eps) {
      lift_sum += ev.aero_force.z();
      drag_sum += ev.drag_left_n + ev.drag_right_n;
      mount_sum += ev.mount_force_n;
      ++samples;
    }
    if (k % scenario.decimation == 0) {
      ++summary.rows;
      if (sink) sink(make_record(state, sim.evaluate(state, command), gait, command));
    }
  }

  summary.steps = steps;
  summary.final_time_s = state.time;
  if (samples > 0) {
    summary.mean_lift_n = lift_sum / samples;
    summary.mean_drag_n = drag_sum / samples;
    summary.mean_mount_force_n = mount_sum / static_cast<double>(samples);
  }
  summary.max_constraint_residual = sim.max_constraint_residual();
  return summary;
}

SweepResult sweep(const RobotModel& model, const GaitSchedule& gait,
                  const ScenarioConfig& scenario, int jobs) {
  std::vector<double> winds = scenario.sweep.wind_mps;
  std::vector<double> freqs = scenario.sweep.flap_frequency_hz;
  if (winds.empty()) winds.push_back(scenario.wind_mps.norm());
  if (freqs.empty()) freqs.push_back(gait.frequency_hz);

  SweepResult result;
  for (double w : winds) {
    for (double f : freqs) result.points.push_back({w, f, std::nullopt, std::nullopt, {}});
  }

  auto run_point = [&](SweepPoint& point) {
    try {
      ScenarioConfig sc = scenario;
      sc.wind_mps = headwind(point.wind_speed_mps);
      GaitSchedule g = gait;
      g.frequency_hz = point.flap_frequency_hz;
      validate(g);
      sc.aero_model = AeroModel::unsteady;
      point.unsteady = run_scenario(model, g, sc);
      sc.aero_model = AeroModel::quasi_steady;
      point.quasi_steady = run_scenario(model, g, sc);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(result.points.size())));
  if (workers == 1) {
    for (auto& p : result.points) run_point(p);
    return result;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < result.points.size(); j = next++) {
          run_point(result.points[j]);
        }
      });
    }
  }
  return result;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "time_s",         "flap_phase",      "x_m",             "y_m",
      "z_m",            "roll_rad",        "pitch_rad",       "yaw_rad",
      "q_s_rad",        "q_e_rad",         "vx_mps",          "vy_mps",
      "vz_mps",         "roll_rate_radps", "pitch_rate_radps", "yaw_rate_radps",
      "q_s_rate_radps", "q_e_rate_radps",  "lift_left_n",     "lift_right_n",
      "drag_left_n",    "drag_right_n",    "mount_fx_n",      "mount_fy_n",
      "mount_fz_n",     "mount_mx_nm",     "mount_my_nm",     "mount_mz_nm",
      "lambda_s_nm",    "lambda_e_nm",     "thrust_total_n"};
  return cols;
}

std::string trace_csv_header() {
  std::string out;
  for (const auto& c : trace_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string trace_csv_row(const TraceRecord& r) {
  std::string out = format_double(r.time_s);
  auto add = [&out](double v) {
    out += ',';
    out += format_double(v);
  };
  add(r.flap_phase);
  for (int i = 0; i < 8; ++i) add(r.q[i]);
  for (int i = 0; i < 8; ++i) add(r.qd[i]);
  add(r.lift_left_n);
  add(r.lift_right_n);
  add(r.drag_left_n);
  add(r.drag_right_n);
  for (int i = 0; i < 3; ++i) add(r.mount_force_n[i]);
  for (int i = 0; i < 3; ++i) add(r.mount_torque_nm[i]);
  add(r.lambda[0]);
  add(r.lambda[1]);
  add(r.thrust_total_n);
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "wind_mps,flap_frequency_hz,lift_unsteady_n,drag_unsteady_n,lift_quasi_steady_n,"
         "drag_quasi_steady_n,error\n";
  auto cell = [](const std::optional<RunSummary>& s, bool lift) {
    return s ? format_double(lift ? s->mean_lift_n : s->mean_drag_n) : std::string();
  };
  for (const auto& p : result.points) {
    std::string error = p.error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << format_double(p.wind_speed_mps) << ',' << format_double(p.flap_frequency_hz) << ','
        << cell(p.unsteady, true) << ',' << cell(p.unsteady, false) << ','
        << cell(p.quasi_steady, true) << ',' << cell(p.quasi_steady, false) << ',' << error
        << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(const RunSummary& s) {
  return {{"mode", to_string(s.mode)},
          {"aero_model", to_string(s.aero_model)},
          {"wind_speed_mps", s.wind_speed_mps},
          {"flap_frequency_hz", s.flap_frequency_hz},
          {"steps", s.steps},
          {"rows", s.rows},
          {"final_time_s", s.final_time_s},
          {"cycles_averaged", s.cycles_averaged},
          {"mean_lift_n", s.mean_lift_n},
          {"mean_drag_n", s.mean_drag_n},
          {"mean_mount_force_n",
           {s.mean_mount_force_n.x(), s.mean_mount_force_n.y(), s.mean_mount_force_n.z()}},
          {"max_constraint_residual", s.max_constraint_residual}};
}

}  // namespace flapsim
