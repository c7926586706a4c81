#pragma once

#include <vector>

#include "flapsim/types.hpp"

namespace flapsim {

/// Spanwise chord distribution c(y), symmetric about the body centerline.
///
/// Two shapes are supported: a piecewise-linear table over the half span
/// |y| in [0, S/2], and an elliptic planform c0*sqrt(1 - (2y/S)^2).
class ChordDistribution {
 public:
  enum class Kind { table, elliptic };

  static ChordDistribution table(std::vector<double> stations_m, std::vector<double> chords_m);
  static ChordDistribution elliptic(double root_chord_m);

  Kind kind() const noexcept { return kind_; }
  /// Chord at spanwise station y for a wing of total span `span_m`.
  double at(double y, double span_m) const;
  double root_chord() const;

  const std::vector<double>& stations() const noexcept { return stations_; }
  const std::vector<double>& chords() const noexcept { return chords_; }

 private:
  Kind kind_ = Kind::table;
  double root_chord_ = 0.0;
  std::vector<double> stations_;
  std::vector<double> chords_;
};

/// One rigid wing segment of the left wing; the right wing mirrors it.
struct WingSegment {
  double mass_kg = 0.0;
  /// Extent along the segment's local y axis (the leading-edge line).
  double length_m = 0.0;
  /// Center of mass in the segment frame (origin at the proximal joint).
  Vec3 com_m = Vec3::Zero();
  /// Inertia about the center of mass, segment axes.
  Mat3 inertia_kgm2 = Mat3::Identity();
};

struct Thruster {
  Vec3 position_m = Vec3::Zero();  // body frame, relative to body COM
  Vec3 axis = Vec3::UnitZ();       // unit thrust direction, body frame
  double max_thrust_n = 0.0;
};

/// Morphology and aerodynamic constants of the vehicle.
///
/// Body frame: x forward, y left, z up, origin at the main-body center of
/// mass. The left shoulder sits at `shoulder_position_m` (y > 0); the
/// proximal segment rotates about `shoulder_axis` (body frame) and the
/// distal segment about `elbow_axis` (proximal frame) at local (0, L_p, 0).
struct RobotModel {
  double body_mass_kg = 0.0;
  Mat3 body_inertia_kgm2 = Mat3::Identity();

  Vec3 shoulder_position_m = Vec3::Zero();
  Vec3 shoulder_axis = Vec3::UnitX();
  Vec3 elbow_axis = -Vec3::UnitZ();
  WingSegment proximal;
  WingSegment distal;

  double span_m = 0.30;
  ChordDistribution chord = ChordDistribution::elliptic(0.08);
  double lift_slope_per_rad = 2.0 * kPi;
  double air_density_kgm3 = 1.225;
  double profile_drag_coeff = 0.02;
  int n_elements = 16;
  double gravity_mps2 = 9.81;

  std::vector<Thruster> thrusters;

  double total_mass_kg() const;
  double root_chord_m() const { return chord.root_chord(); }
};

/// Throws ValidationError naming the first violated invariant.
void validate(const RobotModel& model);

}  // namespace flapsim
