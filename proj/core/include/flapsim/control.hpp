#pragma once

#include <vector>

#include <Eigen/Core>

#include "flapsim/model.hpp"
#include "flapsim/types.hpp"

namespace flapsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integrator_clamp = 1.0;
  double output_clamp = 1.0;
};

struct PidState {
  double integrator = 0.0;
};

struct PidOutput {
  double output = 0.0;
  PidState state;
};

/// Parallel-form PID with a clamped integrator (anti-windup) and a clamped
/// output. `error_rate` is supplied by the caller, typically minus the
/// measured rate so that setpoint steps do not kick the derivative.
PidOutput pid_step(const PidGains& gains, double error, double error_rate, double dt,
                   PidState state);

/// Gains of the guard stabilizer: outer x/y velocity loops command pitch and
/// roll, inner attitude loops command moments. Altitude is open loop.
struct CascadeGains {
  // Attitude poles at -6, -8, -10 rad/s for the default airframe inertias.
  PidGains roll{1.26e-2, 3.2e-2, 1.6e-3, 0.5, 0.01};
  PidGains pitch{6.2e-3, 1.6e-2, 7.9e-4, 0.5, 0.01};
  PidGains vx{0.15, 0.02, 0.0, 1.0, 0.3};
  PidGains vy{0.15, 0.02, 0.0, 1.0, 0.3};
  double collective_n = 0.3924;
};

/// Attitude and velocity in aviation sign conventions: roll positive right
/// wing down, pitch positive nose up. Velocities are heading-frame, x
/// forward and y to the left.
struct StabilizerMeasurement {
  double roll_rad = 0.0;
  double pitch_rad = 0.0;
  double roll_rate_radps = 0.0;
  double pitch_rate_radps = 0.0;
  double vx_mps = 0.0;
  double vy_mps = 0.0;
};

struct StabilizerSetpoint {
  double vx_mps = 0.0;
  double vy_mps = 0.0;
  double roll_trim_rad = 0.0;
  double pitch_trim_rad = 0.0;
};

struct CascadeState {
  PidState roll, pitch, vx, vy;
};

struct CascadeOutput {
  double roll_moment_nm = 0.0;   // about body x
  double pitch_moment_nm = 0.0;  // nose-up positive
  double collective_n = 0.0;
  double roll_setpoint_rad = 0.0;
  double pitch_setpoint_rad = 0.0;
  CascadeState state;
};

CascadeOutput cascade(const CascadeGains& gains, const StabilizerMeasurement& measured,
                      const StabilizerSetpoint& setpoint, double dt, CascadeState state);

struct ThrusterCommand {
  std::vector<double> thrust_n;
};

struct MixResult {
  ThrusterCommand command;
  /// Achieved (collective, roll moment about body x, moment about body y).
  Eigen::Vector3d achieved = Eigen::Vector3d::Zero();
  bool saturated = false;
};

/// Least-squares allocation of (collective, Mx, My) over the thruster layout.
class Mixer {
 public:
  explicit Mixer(const std::vector<Thruster>& thrusters);

  /// `request` is (collective N, Mx N*m, My N*m) in body axes.
  MixResult mix(const Eigen::Vector3d& request) const;
  /// Wrench (collective, Mx, My) produced by a command.
  Eigen::Vector3d wrench(const ThrusterCommand& command) const;
  const Eigen::Matrix<double, 3, Eigen::Dynamic>& allocation() const noexcept {
    return allocation_;
  }

 private:
  std::vector<Thruster> thrusters_;
  Eigen::Matrix<double, 3, Eigen::Dynamic> allocation_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> pseudo_inverse_;
};

/// Body-axis request from a cascade output (pitch nose-up maps to -My).
Eigen::Vector3d body_request(const CascadeOutput& out);

}  // namespace flapsim
