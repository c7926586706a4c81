#pragma once

#include <vector>

#include "flapsim/types.hpp"

namespace flapsim {

/// q(t) = offset + amplitude * sin(2*pi*f*t + phase)
struct SinusoidWave {
  double amplitude_rad = 0.0;
  double offset_rad = 0.0;
  double phase_rad = 0.0;
};

/// One flap period sampled uniformly in phase, evaluated by trigonometric
/// interpolation so that position, rate and acceleration stay consistent.
class TabulatedWave {
 public:
  TabulatedWave() = default;
  explicit TabulatedWave(std::vector<double> samples_rad);

  const std::vector<double>& samples() const noexcept { return samples_; }
  /// Value and first two derivatives with respect to phase angle.
  Eigen::Vector3d eval(double phase_angle) const;

 private:
  std::vector<double> samples_;
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct JointState {
  Vec2 position = Vec2::Zero();      // (q_s, q_e)
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();  // the constraint target y_ks
};

/// Prescribed shoulder/elbow trajectories.
struct GaitSchedule {
  enum class Waveform { sinusoid, tabulated };

  Waveform waveform = Waveform::sinusoid;
  double frequency_hz = 2.0;
  SinusoidWave shoulder{0.6, 0.1, 0.0};
  SinusoidWave elbow{0.4, -0.4, -kPi / 2.0};
  TabulatedWave shoulder_table;
  TabulatedWave elbow_table;
};

JointState gait_eval(const GaitSchedule& gait, double t);

/// Fractional position inside the current flap cycle, in [0, 1).
double flap_phase(const GaitSchedule& gait, double t);

inline constexpr double kMaxFlapFrequencyHz = 8.0;

void validate(const GaitSchedule& gait);

}  // namespace flapsim
