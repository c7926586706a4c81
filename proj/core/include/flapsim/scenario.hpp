#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flapsim/control.hpp"
#include "flapsim/types.hpp"

namespace flapsim {

enum class Mode { tethered, free_flight, guard_stabilized };
enum class AeroModel { unsteady, quasi_steady, off };

std::string to_string(Mode mode);
std::string to_string(AeroModel model);

struct InitialConditions {
  Vec3 position_m = Vec3::Zero();
  /// (roll, pitch, yaw), Z-Y-X convention. In tethered mode this is the mount attitude.
  Vec3 attitude_rad = Vec3::Zero();
  Vec3 velocity_mps = Vec3::Zero();
  Vec3 euler_rates_radps = Vec3::Zero();
};

struct SweepGrid {
  std::vector<double> wind_mps;
  std::vector<double> flap_frequency_hz;
};

struct ScenarioConfig {
  Mode mode = Mode::tethered;
  AeroModel aero_model = AeroModel::unsteady;
  /// Air velocity in the inertial frame. A headwind of speed U is (-U, 0, 0).
  Vec3 wind_mps = Vec3(-1.0, 0.0, 0.0);
  double duration_s = 5.0;
  double dt_s = 5e-4;
  int decimation = 10;
  int transient_cycles = 3;
  double freestream_floor_mps = 0.1;
  InitialConditions initial;
  SweepGrid sweep;
  CascadeGains controller;
  StabilizerSetpoint setpoint;
  std::uint64_t seed = 0;
  /// Relative half-width of a uniform random perturbation applied to segment masses.
  double mass_perturbation = 0.0;
};

/// Headwind along -x with speed `speed_mps`.
inline Vec3 headwind(double speed_mps) { return Vec3(-speed_mps, 0.0, 0.0); }

void validate(const ScenarioConfig& scenario);

}  // namespace flapsim
