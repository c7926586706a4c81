#include "flapsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "flapsim/error.hpp"

namespace flapsim {

ChordDistribution ChordDistribution::table(std::vector<double> stations_m,
                                           std::vector<double> chords_m) {
  if (stations_m.size() != chords_m.size() || stations_m.size() < 2) {
    throw ValidationError("chord", "table needs matching stations_m and chords_m, at least 2 rows");
  }
  if (stations_m.front() != 0.0) {
    throw ValidationError("chord.stations_m", "first station must be 0 (centerline)");
  }
  for (std::size_t i = 1; i < stations_m.size(); ++i) {
    if (!(stations_m[i] > stations_m[i - 1])) {
      throw ValidationError("chord.stations_m", "stations must be strictly increasing");
    }
  }
  ChordDistribution c;
  c.kind_ = Kind::table;
  c.root_chord_ = chords_m.front();
  c.stations_ = std::move(stations_m);
  c.chords_ = std::move(chords_m);
  return c;
}

ChordDistribution ChordDistribution::elliptic(double root_chord_m) {
  ChordDistribution c;
  c.kind_ = Kind::elliptic;
  c.root_chord_ = root_chord_m;
  return c;
}

double ChordDistribution::at(double y, double span_m) const {
  const double half = 0.5 * span_m;
  const double r = std::abs(y);
  if (kind_ == Kind::elliptic) {
    const double s = std::clamp(r / half, 0.0, 1.0);
    return root_chord_ * std::sqrt(1.0 - s * s);
  }
  if (r >= stations_.back()) return chords_.back();
  const auto it = std::upper_bound(stations_.begin(), stations_.end(), r);
  const auto hi = static_cast<std::size_t>(it - stations_.begin());
  const std::size_t lo = hi - 1;
  const double f = (r - stations_[lo]) / (stations_[hi] - stations_[lo]);
  return chords_[lo] + f * (chords_[hi] - chords_[lo]);
}

double ChordDistribution::root_chord() const { return root_chord_; }

double RobotModel::total_mass_kg() const {
  return body_mass_kg + 2.0 * (proximal.mass_kg + distal.mass_kg);
}

namespace {

void require_spd(const Mat3& inertia, const std::string& field) {
  if (!inertia.allFinite()) throw ValidationError(field, "inertia must be finite");
  if ((inertia - inertia.transpose()).norm() > 1e-12 * std::max(1.0, inertia.norm())) {
    throw ValidationError(field, "inertia must be symmetric");
  }
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success || inertia.diagonal().minCoeff() <= 0.0) {
    throw ValidationError(field, "inertia must be positive definite");
  }
}

void require_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be > 0 (got " + std::to_string(value) + ")");
  }
}

void require_unit(const Vec3& axis, const std::string& field) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) {
    throw ValidationError(field, "must be a unit vector");
  }
}

void validate_segment(const WingSegment& s, const std::string& name) {
  require_positive(s.mass_kg, name + ".mass_kg");
  require_positive(s.length_m, name + ".length_m");
  if (!s.com_m.allFinite()) throw ValidationError(name + ".com_m", "must be finite");
  require_spd(s.inertia_kgm2, name + ".inertia_kgm2");
}

}  // namespace

void validate(const RobotModel& m) {
  require_positive(m.body_mass_kg, "body_mass_kg");
  require_spd(m.body_inertia_kgm2, "body_inertia_kgm2");
  validate_segment(m.proximal, "proximal");
  validate_segment(m.distal, "distal");
  require_positive(m.span_m, "span_m");
  if (!m.shoulder_position_m.allFinite() || !(m.shoulder_position_m.y() > 0.0)) {
    throw ValidationError("shoulder_position_m", "left shoulder must lie at y > 0");
  }
  require_unit(m.shoulder_axis, "shoulder_axis");
  require_unit(m.elbow_axis, "elbow_axis");
  const double reach = m.shoulder_position_m.y() + m.proximal.length_m + m.distal.length_m;
  if (std::abs(reach - 0.5 * m.span_m) > 1e-6) {
    throw ValidationError("span_m", "half span " + std::to_string(0.5 * m.span_m) +
                                        " m must equal shoulder y + proximal + distal length (" +
                                        std::to_string(reach) + " m)");
  }
  require_positive(m.chord.root_chord(), "chord.root_chord_m");
  if (m.chord.kind() == ChordDistribution::Kind::table) {
    const auto& c = m.chord.chords();
    const auto& s = m.chord.stations();
    for (std::size_t i = 0; i < c.size(); ++i) {
      // The tip chord may vanish; every interior chord must be positive.
      const bool tip = s[i] >= 0.5 * m.span_m - 1e-12;
      if (!std::isfinite(c[i]) || c[i] < 0.0 || (!tip && c[i] <= 0.0)) {
        throw ValidationError("chord.chords_m", "chord must be > 0 on the open span");
      }
    }
    if (s.back() < 0.5 * m.span_m - 1e-9) {
      throw ValidationError("chord.stations_m", "table must reach the wing tip (span_m / 2)");
    }
  }
  require_positive(m.lift_slope_per_rad, "lift_slope_per_rad");
  require_positive(m.air_density_kgm3, "air_density_kgm3");
  if (!(m.profile_drag_coeff >= 0.0) || !std::isfinite(m.profile_drag_coeff)) {
    throw ValidationError("profile_drag_coeff", "must be >= 0");
  }
  if (m.n_elements < 2) {
    throw ValidationError("n_elements", "need at least 2 blade elements (got " +
                                            std::to_string(m.n_elements) + ")");
  }
  require_positive(m.gravity_mps2, "gravity_mps2");
  for (std::size_t i = 0; i < m.thrusters.size(); ++i) {
    const auto name = "thrusters[" + std::to_string(i) + "]";
    if (!m.thrusters[i].position_m.allFinite()) {
      throw ValidationError(name + ".position_m", "must be finite");
    }
    require_unit(m.thrusters[i].axis, name + ".axis");
    require_positive(m.thrusters[i].max_thrust_n, name + ".max_thrust_n");
  }
}

}  // namespace flapsim
