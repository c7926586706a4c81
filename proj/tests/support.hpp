#pragma once

#include <string>

#include "flapsim/config_io.hpp"
#include "flapsim/model.hpp"

namespace flapsim::test {

inline std::string data_path(const std::string& name) {
  return std::string(FLAPSIM_TEST_DATA_DIR) + "/" + name;
}

inline RobotModel default_robot() { return load_robot(data_path("aerobat.json")); }
inline GaitSchedule default_gait() { return load_gait(data_path("gait_default.json")); }
inline ScenarioConfig tethered_scenario() { return load_scenario(data_path("scenario_tethered.json")); }

inline Json default_robot_json() { return read_json_file(data_path("aerobat.json")); }

/// Gait with both joints held at fixed angles.
inline GaitSchedule frozen_gait(double shoulder = 0.1, double elbow = -0.4) {
  GaitSchedule g;
  g.frequency_hz = 2.0;
  g.shoulder = {0.0, shoulder, 0.0};
  g.elbow = {0.0, elbow, 0.0};
  return g;
}

inline double rel_err(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace flapsim::test
