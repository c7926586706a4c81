#include "flapsim/scenario.hpp"

#include <cmath>

#include "flapsim/error.hpp"

namespace flapsim {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::tethered: return "tethered";
    case Mode::free_flight: return "free_flight";
    case Mode::guard_stabilized: return "guard_stabilized";
  }
  return "unknown";
}

std::string to_string(AeroModel model) {
  switch (model) {
    case AeroModel::unsteady: return "unsteady";
    case AeroModel::quasi_steady: return "quasi_steady";
    case AeroModel::off: return "off";
  }
  return "unknown";
}

namespace {

void validate_gains(const PidGains& g, const std::string& name) {
  if (!std::isfinite(g.kp) || !std::isfinite(g.ki) || !std::isfinite(g.kd)) {
    throw ValidationError(name, "gains must be finite");
  }
  if (!(g.integrator_clamp > 0.0) || !(g.output_clamp > 0.0)) {
    throw ValidationError(name, "clamps must be > 0");
  }
}

}  // namespace

void validate(const ScenarioConfig& s) {
  if (!(s.dt_s > 0.0) || !std::isfinite(s.dt_s)) throw ValidationError("dt_s", "must be > 0");
  if (!(s.duration_s >= s.dt_s) || !std::isfinite(s.duration_s)) {
    throw ValidationError("duration_s", "must be >= dt_s");
  }
  if (!s.wind_mps.allFinite()) throw ValidationError("wind_mps", "must be finite");
  if (s.decimation < 1) throw ValidationError("decimation", "must be >= 1");
  if (s.transient_cycles < 0) throw ValidationError("transient_cycles", "must be >= 0");
  if (!(s.freestream_floor_mps > 0.0)) {
    throw ValidationError("freestream_floor_mps", "must be > 0");
  }
  if (!(s.mass_perturbation >= 0.0 && s.mass_perturbation < 1.0)) {
    throw ValidationError("mass_perturbation", "must lie in [0, 1)");
  }
  const auto& init = s.initial;
  if (!init.position_m.allFinite() || !init.attitude_rad.allFinite() ||
      !init.velocity_mps.allFinite() || !init.euler_rates_radps.allFinite()) {
    throw ValidationError("initial", "values must be finite");
  }
  if (std::abs(init.attitude_rad.y()) >= kPi / 2.0) {
    throw ValidationError("initial.attitude_rad", "|pitch| must be < pi/2");
  }
  if (s.aero_model == AeroModel::unsteady) {
    const Vec3 body_velocity = s.mode == Mode::tethered ? Vec3::Zero() : init.velocity_mps;
    const double freestream = (s.wind_mps - body_velocity).norm();
    if (freestream < s.freestream_floor_mps) {
      throw ValidationError("wind_mps", "freestream " + std::to_string(freestream) +
                                            " m/s is below the unsteady-model floor of " +
                                            std::to_string(s.freestream_floor_mps) + " m/s");
    }
  }
  for (double w : s.sweep.wind_mps) {
    if (!std::isfinite(w)) throw ValidationError("sweep.wind_mps", "must be finite");
  }
  for (double f : s.sweep.flap_frequency_hz) {
    if (!std::isfinite(f) || f < 0.0) {
      throw ValidationError("sweep.flap_frequency_hz", "must be finite and >= 0");
    }
  }
  validate_gains(s.controller.roll, "controller.roll");
  validate_gains(s.controller.pitch, "controller.pitch");
  validate_gains(s.controller.vx, "controller.vx");
  validate_gains(s.controller.vy, "controller.vy");
  if (!std::isfinite(s.controller.collective_n) || s.controller.collective_n < 0.0) {
    throw ValidationError("controller.collective_n", "must be finite and >= 0");
  }
}

}  // namespace flapsim
