#include "flapsim/control.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "flapsim/error.hpp"

namespace flapsim {

PidOutput pid_step(const PidGains& g, double error, double error_rate, double dt,
                   PidState state) {
  state.integrator =
      std::clamp(state.integrator + error * dt, -g.integrator_clamp, g.integrator_clamp);
  const double raw = g.kp * error + g.ki * state.integrator + g.kd * error_rate;
  return {std::clamp(raw, -g.output_clamp, g.output_clamp), state};
}

CascadeOutput cascade(const CascadeGains& g, const StabilizerMeasurement& m,
                      const StabilizerSetpoint& sp, double dt, CascadeState state) {
  CascadeOutput out;

  // Forward speed error pitches the nose down; leftward error rolls left (negative).
  const auto vx = pid_step(g.vx, sp.vx_mps - m.vx_mps, 0.0, dt, state.vx);
  const auto vy = pid_step(g.vy, sp.vy_mps - m.vy_mps, 0.0, dt, state.vy);
  out.pitch_setpoint_rad = sp.pitch_trim_rad - vx.output;
  out.roll_setpoint_rad = sp.roll_trim_rad - vy.output;

  const auto roll = pid_step(g.roll, out.roll_setpoint_rad - m.roll_rad, -m.roll_rate_radps, dt,
                             state.roll);
  const auto pitch = pid_step(g.pitch, out.pitch_setpoint_rad - m.pitch_rad,
                              -m.pitch_rate_radps, dt, state.pitch);

  out.roll_moment_nm = roll.output;
  out.pitch_moment_nm = pitch.output;
  out.collective_n = g.collective_n;
  out.state = {roll.state, pitch.state, vx.state, vy.state};
  return out;
}

Mixer::Mixer(const std::vector<Thruster>& thrusters) : thrusters_(thrusters) {
  const auto n = static_cast<int>(thrusters.size());
  if (n < 4) throw MixingError("mixer needs at least 4 thrusters, got " + std::to_string(n));
  allocation_.resize(3, n);
  for (int i = 0; i < n; ++i) {
    const Vec3 moment = thrusters[i].position_m.cross(thrusters[i].axis);
    allocation_.col(i) << thrusters[i].axis.z(), moment.x(), moment.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(allocation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-12 * std::max(1.0, sv.maxCoeff())) {
    throw MixingError("thruster layout has no authority over collective/roll/pitch");
  }
  pseudo_inverse_ = allocation_.transpose() *
                    (allocation_ * allocation_.transpose()).inverse();
}

MixResult Mixer::mix(const Eigen::Vector3d& request) const {
  const Eigen::VectorXd raw = pseudo_inverse_ * request;
  MixResult result;
  result.command.thrust_n.resize(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double clamped = std::clamp(raw[i], 0.0, thrusters_[i].max_thrust_n);
    result.saturated = result.saturated || clamped != raw[i];
    result.command.thrust_n[i] = clamped;
  }
  result.achieved = wrench(result.command);
  return result;
}

Eigen::Vector3d Mixer::wrench(const ThrusterCommand& command) const {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < command.thrust_n.size(); ++i) {
    w += allocation_.col(static_cast<Eigen::Index>(i)) * command.thrust_n[i];
  }
  return w;
}

Eigen::Vector3d body_request(const CascadeOutput& out) {
  return {out.collective_n, out.roll_moment_nm, -out.pitch_moment_nm};
}

}  // namespace flapsim
