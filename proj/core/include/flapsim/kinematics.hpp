#pragma once

#include <array>
#include <vector>

#include "flapsim/model.hpp"
#include "flapsim/types.hpp"

namespace flapsim {

/// Generalized coordinates and rates, layout per `coord`.
struct GeneralizedState {
  Vec8 q = Vec8::Zero();
  Vec8 qd = Vec8::Zero();

  Vec3 position() const { return q.head<3>(); }
  Vec3 euler() const { return q.segment<3>(coord::kRoll); }
  Vec3 velocity() const { return qd.head<3>(); }
};

enum class Body { main = 0, left_proximal, left_distal, right_proximal, right_distal };
inline constexpr int kBodyCount = 5;

/// A point rigidly attached to one body, in that body's frame. The right
/// wing segment frames are mirror images of the left ones, so a left point
/// (x, y, z) corresponds to the right point (x, -y, z).
struct AttachmentPoint {
  Body body = Body::main;
  Vec3 local = Vec3::Zero();
};

struct AttachmentId {
  enum class Kind { blade_element, thruster };
  Kind kind = Kind::blade_element;
  int index = 0;
};

struct BodyPose {
  Mat3 rotation = Mat3::Identity();  // body frame -> inertial
  Vec3 origin = Vec3::Zero();        // inertial position of the frame origin
  Vec3 com = Vec3::Zero();           // inertial center of mass
};

/// Rotation for Z-Y-X Euler angles (roll, pitch, yaw).
Mat3 euler_rotation(const Vec3& roll_pitch_yaw);

/// Throws KinematicsError when |pitch| is inside the gimbal-lock guard band.
void check_gimbal(const Vec8& q);

inline constexpr double kGimbalMargin = 1e-6;

/// Chain geometry at one configuration. All point offsets are stored
/// relative to the main-body COM so that Jacobians do not depend on p.
class ChainFrame {
 public:
  ChainFrame(const RobotModel& model, const Vec8& q);

  const Vec3& p() const noexcept { return p_; }
  const Mat3& rotation(Body body) const { return rotation_[static_cast<int>(body)]; }
  /// Frame origin of `body` relative to p.
  const Vec3& origin_rel(Body body) const { return origin_rel_[static_cast<int>(body)]; }
  /// Columns of the Euler-rate map: omega = E * [roll_dot, pitch_dot, yaw_dot].
  const Mat3& euler_axes() const noexcept { return euler_axes_; }

  Vec3 point_rel(const AttachmentPoint& point) const;
  Vec3 point(const AttachmentPoint& point) const { return p_ + point_rel(point); }

  /// Linear velocity Jacobian d(pdot)/d(qdot) of an attached point.
  Mat38 linear_jacobian(const AttachmentPoint& point) const;
  /// Angular velocity Jacobian of a body, inertial frame.
  Mat38 angular_jacobian(Body body) const;

 private:
  Vec3 p_;
  Mat3 euler_axes_;
  std::array<Mat3, kBodyCount> rotation_;
  std::array<Vec3, kBodyCount> origin_rel_;
  // index 0 = left, 1 = right
  std::array<Vec3, 2> shoulder_axis_;
  std::array<Vec3, 2> elbow_axis_;
  std::array<Vec3, 2> shoulder_rel_;
  std::array<Vec3, 2> elbow_rel_;
};

/// Poses of the five bodies (main, left proximal/distal, right proximal/distal).
std::array<BodyPose, kBodyCount> forward_kinematics(const RobotModel& model,
                                                    const GeneralizedState& state);

/// Fixed spanwise geometry of one blade element.
struct ElementStation {
  double theta = 0.0;     // collocation angle, y = (S/2) cos(theta)
  double y_m = 0.0;       // spanwise station, positive on the left wing
  double chord_m = 0.0;
  double half_chord_m = 0.0;
  double width_m = 0.0;   // strip width used for force integration
  int side = 0;           // +1 left, -1 right, 0 on the centerline
  AttachmentPoint attachment;  // quarter-chord point
};

/// Stations at theta_i = i*pi/(m+1), i = 1..m, across the full span.
std::vector<ElementStation> element_stations(const RobotModel& model);

struct BladeElementState {
  ElementStation station;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 normal = Vec3::Zero();   // wing-surface normal (up for a level wing)
  Vec3 chord_dir = Vec3::Zero();  // toward the leading edge
  Vec3 span_dir = Vec3::Zero();   // local y axis of the carrying body
  Vec3 air_velocity = Vec3::Zero();  // wind minus point velocity
  double v_n = 0.0;  // normal component of the relative air velocity
  double v_e = 0.0;  // chordwise relative speed, positive when flow meets the leading edge
  Mat83 jacobian = Mat83::Zero();  // B = (d pdot / d qdot)^T
};

std::vector<BladeElementState> blade_elements(const RobotModel& model,
                                              const GeneralizedState& state, const Vec3& wind);
/// Same, reusing precomputed stations and chain frame.
std::vector<BladeElementState> blade_elements(const std::vector<ElementStation>& stations,
                                              const ChainFrame& frame, const Vec8& qd,
                                              const Vec3& wind);

/// Attachment of a blade element or thruster; throws UnknownAttachmentError.
AttachmentPoint attachment_point(const RobotModel& model, AttachmentId id);

Mat83 force_jacobian(const RobotModel& model, const GeneralizedState& state, AttachmentId id);

}  // namespace flapsim
