#pragma once

#include <string>
#include <vector>

#include "flapsim/kinematics.hpp"
#include "flapsim/model.hpp"

namespace flapsim::oracles {

/// Outcome of one reference comparison.
struct OracleResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Direct evaluation of the Jones constants: Phi(0), Phi(1), monotonicity, Phi(100).
std::vector<OracleResult> wagner();

/// ODE-marched memory states vs trapezoid quadrature of the convolution
/// integral, sinusoidal downwash at `frequency_hz`.
std::vector<OracleResult> memory_quadrature(double frequency_hz = 1.0, double U = 1.0,
                                            double half_chord = 0.02, double dt = 1e-4,
                                            double horizon = 2.0);

/// Elliptic planform at fixed angle of attack driven to steady state against
/// the classical result a0*alpha / (1 + a0/(pi*AR)); also checks that the
/// quasi-steady baseline is not below it.
std::vector<OracleResult> elliptic_lifting_line(int m = 16, double alpha = 0.05);

/// Free fall with every force but gravity removed.
std::vector<OracleResult> free_fall(const RobotModel& model);

/// Energy drift of a tumbling vehicle with frozen joints, aero and thrust off.
std::vector<OracleResult> energy(const RobotModel& model, double horizon = 10.0,
                                 double dt = 1e-3);

/// Two-link pendulum: constrained solve vs minimal-coordinate integration.
std::vector<OracleResult> pendulum();

/// Kinetic energy identity 1/2 qd^T M qd vs pose finite differences.
std::vector<OracleResult> kinetic_energy(const RobotModel& model, int samples = 100);

/// B-matrix finite-difference check and virtual-work equivalence.
std::vector<OracleResult> jacobians(const RobotModel& model, int samples = 100);

/// Linearized roll-plant recovery, closed-loop poles, mixer round trip.
std::vector<OracleResult> control(const RobotModel& model);

/// Kinetic plus potential energy from finite-differenced body poses,
/// without the mass matrix.
double independent_energy(const RobotModel& model, const GeneralizedState& state);

/// Suite names accepted by `run_suite`.
const std::vector<std::string>& suite_names();
/// Runs one named suite ("all" runs every suite).
std::vector<OracleResult> run_suite(const std::string& name, const RobotModel& model);

}  // namespace flapsim::oracles
