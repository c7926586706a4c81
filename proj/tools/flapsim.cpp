// flapsim command-line front end. Every subcommand is a thin wrapper over the
// library API; exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "flapsim/aero.hpp"
#include "flapsim/config_io.hpp"
#include "flapsim/dynamics.hpp"
#include "flapsim/error.hpp"
#include "flapsim/harness.hpp"
#include "flapsim_oracles.hpp"

namespace fs = std::filesystem;
using namespace flapsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct Inputs {
  std::string robot = std::string(FLAPSIM_DEFAULT_DATA_DIR) + "/aerobat.json";
  std::string gait = std::string(FLAPSIM_DEFAULT_DATA_DIR) + "/gait_default.json";
  std::string scenario = std::string(FLAPSIM_DEFAULT_DATA_DIR) + "/scenario_tethered.json";
  std::vector<std::string> overrides;
};

struct Loaded {
  RobotModel robot;
  GaitSchedule gait;
  ScenarioConfig scenario;
};

// Decode, normalize (so every defaulted key is addressable), override, decode again.
Loaded load(const Inputs& in) {
  Json robot = to_json(robot_from_json(read_json_file(in.robot)));
  Json gait = to_json(gait_from_json(read_json_file(in.gait)));
  Json scenario = to_json(scenario_from_json(read_json_file(in.scenario)));
  apply_overrides({&robot, &gait, &scenario}, in.overrides);
  return {robot_from_json(robot), gait_from_json(gait), scenario_from_json(scenario)};
}

void add_inputs(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--robot", in.robot, "robot model JSON")->check(CLI::ExistingFile);
  cmd.add_option("--gait", in.gait, "gait schedule JSON")->check(CLI::ExistingFile);
  cmd.add_option("--scenario", in.scenario, "scenario JSON")->check(CLI::ExistingFile);
  cmd.add_option("--override", in.overrides, "dotted-path override, key=value (repeatable)")
      ->allow_extra_args(false);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string summary_line(const RunSummary& s) {
  return to_string(s.mode) + " " + to_string(s.aero_model) +
         " wind=" + format_double(s.wind_speed_mps) +
         " f=" + format_double(s.flap_frequency_hz) +
         " mean_lift_n=" + format_double(s.mean_lift_n) +
         " mean_drag_n=" + format_double(s.mean_drag_n) +
         " cycles=" + std::to_string(s.cycles_averaged) +
         " max_residual=" + format_double(s.max_constraint_residual);
}

int cmd_validate(const Inputs& in) {
  const Loaded cfg = load(in);
  const auto stations = element_stations(cfg.robot);
  const LiftingLine ll(cfg.robot, stations);
  std::cout << "total_mass_kg " << format_double(cfg.robot.total_mass_kg()) << "\n";
  std::cout << "elements " << stations.size() << "\n";
  for (const auto& st : stations) {
    std::cout << "  y_m " << format_double(st.y_m) << " chord_m " << format_double(st.chord_m)
              << " width_m " << format_double(st.width_m) << "\n";
  }
  std::cout << "collocation_condition " << format_double(ll.condition_estimate()) << "\n";
  // Effective attitude inertias at the reference configuration, used for gain tuning.
  const Mat8 M = mass_matrix(cfg.robot, Vec8::Zero());
  std::cout << "roll_inertia_kgm2 " << format_double(M(coord::kRoll, coord::kRoll)) << "\n";
  std::cout << "pitch_inertia_kgm2 " << format_double(M(coord::kPitch, coord::kPitch)) << "\n";
  std::cout << "valid\n";
  return kExitOk;
}

int cmd_run(const Inputs& in, const fs::path& out_dir) {
  const Loaded cfg = load(in);
  fs::create_directories(out_dir);
  std::ofstream trace(out_dir / "trace.csv", std::ios::binary);
  if (!trace) throw Error("cannot write " + (out_dir / "trace.csv").string());
  trace << trace_csv_header() << "\n";
  const RunSummary s = run_scenario(cfg.robot, cfg.gait, cfg.scenario,
                                    [&trace](const TraceRecord& r) { trace << trace_csv_row(r) << "\n"; });
  trace.close();
  write_file(out_dir / "summary.json", summary_json(s).dump(2) + "\n");
  std::cout << summary_line(s) << "\n";
  return kExitOk;
}

int cmd_sweep(const Inputs& in, const fs::path& out_dir, int jobs) {
  const Loaded cfg = load(in);
  fs::create_directories(out_dir);
  const SweepResult result = sweep(cfg.robot, cfg.gait, cfg.scenario, jobs);
  write_file(out_dir / "sweep.csv", sweep_csv(result));

  // Trace and summary of the first grid point, as a plain run would produce them.
  ScenarioConfig first = cfg.scenario;
  if (!cfg.scenario.sweep.wind_mps.empty()) first.wind_mps = headwind(cfg.scenario.sweep.wind_mps.front());
  GaitSchedule gait = cfg.gait;
  if (!cfg.scenario.sweep.flap_frequency_hz.empty()) gait.frequency_hz = cfg.scenario.sweep.flap_frequency_hz.front();
  std::ofstream trace(out_dir / "trace.csv", std::ios::binary);
  trace << trace_csv_header() << "\n";
  const RunSummary s = run_scenario(cfg.robot, gait, first,
                                    [&trace](const TraceRecord& r) { trace << trace_csv_row(r) << "\n"; });
  write_file(out_dir / "summary.json", summary_json(s).dump(2) + "\n");

  bool failed = false;
  for (const auto& p : result.points) {
    if (p.unsteady) std::cout << summary_line(*p.unsteady) << "\n";
    if (p.quasi_steady) std::cout << summary_line(*p.quasi_steady) << "\n";
    if (!p.error.empty()) {
      failed = true;
      std::cout << "error wind=" << format_double(p.wind_speed_mps)
                << " f=" << format_double(p.flap_frequency_hz) << ": " << p.error << "\n";
    }
  }
  return failed ? kExitRuntime : kExitOk;
}

int cmd_oracle(const std::string& suite, const std::string& robot_path) {
  const RobotModel model = load_robot(robot_path);
  const auto results = oracles::run_suite(suite, model);
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " measured=" << format_double(r.measured)
              << " threshold=" << format_double(r.threshold);
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
  }
  return ok ? kExitOk : kExitRuntime;
}

void configure_logging() {
  const char* level = std::getenv("FLAPSIM_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"flapsim: flapping-wing flight dynamics simulator"};
  app.require_subcommand(1);

  Inputs in;
  std::string out_dir = "out";
  int jobs = 1;
  std::string suite = "all";

  auto* validate = app.add_subcommand("validate", "load and check configs, print derived quantities");
  add_inputs(*validate, in);
  auto* run = app.add_subcommand("run", "run one scenario, write trace.csv and summary.json");
  add_inputs(*run, in);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads (unused for a single run)")->check(CLI::PositiveNumber);
  auto* sweep_cmd = app.add_subcommand("sweep", "run the scenario's wind x frequency grid");
  add_inputs(*sweep_cmd, in);
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--jobs", jobs, "grid points run concurrently")->check(CLI::PositiveNumber);
  auto* oracle = app.add_subcommand("oracle", "run a verification suite");
  oracle->add_option("suite", suite, "suite name")->check(CLI::IsMember(oracles::suite_names()));
  oracle->add_option("--robot", in.robot, "robot model JSON")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    spdlog::debug("robot={} gait={} scenario={}", in.robot, in.gait, in.scenario);
    if (*validate) return cmd_validate(in);
    if (*run) return cmd_run(in, out_dir);
    if (*sweep_cmd) return cmd_sweep(in, out_dir, jobs);
    if (*oracle) return cmd_oracle(suite, in.robot);
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
