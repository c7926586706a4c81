#include "flapsim/gait.hpp"

#include <cmath>
#include <string>

#include "flapsim/error.hpp"

namespace flapsim {

TabulatedWave::TabulatedWave(std::vector<double> samples_rad) : samples_(std::move(samples_rad)) {
  const auto n = static_cast<int>(samples_.size());
  if (n < 3) throw ValidationError("samples_rad", "tabulated waveform needs at least 3 samples");
  double sum = 0.0;
  for (double s : samples_) sum += s;
  mean_ = sum / n;
  const int harmonics = n / 2;
  cos_.assign(harmonics, 0.0);
  sin_.assign(harmonics, 0.0);
  for (int j = 1; j <= harmonics; ++j) {
    // The Nyquist harmonic of an even table carries half weight and no sine.
    const bool nyquist = (n % 2 == 0) && j == harmonics;
    const double scale = nyquist ? 1.0 / n : 2.0 / n;
    double c = 0.0, s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * kPi * j * k / n;
      c += samples_[k] * std::cos(phi);
      s += samples_[k] * std::sin(phi);
    }
    cos_[j - 1] = scale * c;
    sin_[j - 1] = nyquist ? 0.0 : scale * s;
  }
}

Eigen::Vector3d TabulatedWave::eval(double phase_angle) const {
  Eigen::Vector3d out(mean_, 0.0, 0.0);
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    const double c = std::cos(j * phase_angle);
    const double s = std::sin(j * phase_angle);
    out[0] += cos_[i] * c + sin_[i] * s;
    out[1] += j * (-cos_[i] * s + sin_[i] * c);
    out[2] += -j * j * (cos_[i] * c + sin_[i] * s);
  }
  return out;
}

namespace {

Eigen::Vector3d sinusoid(const SinusoidWave& w, double omega, double t) {
  const double arg = omega * t + w.phase_rad;
  const double s = std::sin(arg);
  const double c = std::cos(arg);
  return {w.offset_rad + w.amplitude_rad * s, omega * w.amplitude_rad * c,
          -omega * omega * w.amplitude_rad * s};
}

}  // namespace

JointState gait_eval(const GaitSchedule& gait, double t) {
  const double omega = 2.0 * kPi * gait.frequency_hz;
  Eigen::Vector3d s, e;
  if (gait.waveform == GaitSchedule::Waveform::sinusoid) {
    s = sinusoid(gait.shoulder, omega, t);
    e = sinusoid(gait.elbow, omega, t);
  } else {
    const double phase = omega * t;
    s = gait.shoulder_table.eval(phase);
    e = gait.elbow_table.eval(phase);
    s[1] *= omega;
    s[2] *= omega * omega;
    e[1] *= omega;
    e[2] *= omega * omega;
  }
  JointState js;
  js.position = {s[0], e[0]};
  js.velocity = {s[1], e[1]};
  js.acceleration = {s[2], e[2]};
  return js;
}

double flap_phase(const GaitSchedule& gait, double t) {
  const double cycles = gait.frequency_hz * t;
  return cycles - std::floor(cycles);
}

void validate(const GaitSchedule& gait) {
  if (!std::isfinite(gait.frequency_hz) || gait.frequency_hz < 0.0) {
    throw ValidationError("frequency_hz", "must be finite and >= 0");
  }
  if (gait.frequency_hz > kMaxFlapFrequencyHz) {
    throw ValidationError("frequency_hz", "must be <= " + std::to_string(kMaxFlapFrequencyHz) +
                                              " Hz (got " + std::to_string(gait.frequency_hz) +
                                              ")");
  }
  auto finite = [](const SinusoidWave& w) {
    return std::isfinite(w.amplitude_rad) && std::isfinite(w.offset_rad) &&
           std::isfinite(w.phase_rad);
  };
  if (!finite(gait.shoulder)) throw ValidationError("shoulder", "values must be finite");
  if (!finite(gait.elbow)) throw ValidationError("elbow", "values must be finite");
  if (gait.waveform == GaitSchedule::Waveform::tabulated &&
      (gait.shoulder_table.samples().empty() || gait.elbow_table.samples().empty())) {
    throw ValidationError("samples_rad", "tabulated gait needs shoulder and elbow samples");
  }
}

}  // namespace flapsim
