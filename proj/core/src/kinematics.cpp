#include "flapsim/kinematics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "flapsim/error.hpp"

namespace flapsim {

namespace {

const Mat3 kMirror = Vec3(1.0, -1.0, 1.0).asDiagonal();

int side_index(Body body) {
  return (body == Body::right_proximal || body == Body::right_distal) ? 1 : 0;
}

bool is_wing(Body body) { return body != Body::main; }

bool is_distal(Body body) { return body == Body::left_distal || body == Body::right_distal; }

}  // namespace

Mat3 euler_rotation(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

void check_gimbal(const Vec8& q) {
  if (!(std::abs(q[coord::kPitch]) < kPi / 2.0 - kGimbalMargin)) {
    throw KinematicsError("pitch " + std::to_string(q[coord::kPitch]) +
                          " rad is at the Euler-angle singularity (|pitch| >= pi/2)");
  }
}

ChainFrame::ChainFrame(const RobotModel& model, const Vec8& q) : p_(q.head<3>()) {
  check_gimbal(q);
  const double roll = q[coord::kRoll];
  const double pitch = q[coord::kPitch];
  const double yaw = q[coord::kYaw];
  const Mat3 Rz = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  const Mat3 Ry = Eigen::AngleAxisd(pitch, Vec3::UnitY()).toRotationMatrix();
  const Mat3 Rx = Eigen::AngleAxisd(roll, Vec3::UnitX()).toRotationMatrix();
  const Mat3 Rb = Rz * Ry * Rx;
  euler_axes_.col(0) = Rz * Ry * Vec3::UnitX();
  euler_axes_.col(1) = Rz * Vec3::UnitY();
  euler_axes_.col(2) = Vec3::UnitZ();

  // Left chain in body coordinates.
  const Mat3 prox_b =
      Eigen::AngleAxisd(q[coord::kShoulder], model.shoulder_axis).toRotationMatrix();
  const Mat3 dist_b =
      prox_b * Eigen::AngleAxisd(q[coord::kElbow], model.elbow_axis).toRotationMatrix();
  const Vec3 shoulder_b = model.shoulder_position_m;
  const Vec3 elbow_b = shoulder_b + prox_b * Vec3(0.0, model.proximal.length_m, 0.0);
  const Vec3 shoulder_axis_b = model.shoulder_axis;
  const Vec3 elbow_axis_b = prox_b * model.elbow_axis;

  rotation_[static_cast<int>(Body::main)] = Rb;
  origin_rel_[static_cast<int>(Body::main)] = Vec3::Zero();

  rotation_[static_cast<int>(Body::left_proximal)] = Rb * prox_b;
  rotation_[static_cast<int>(Body::left_distal)] = Rb * dist_b;
  rotation_[static_cast<int>(Body::right_proximal)] = Rb * kMirror * prox_b * kMirror;
  rotation_[static_cast<int>(Body::right_distal)] = Rb * kMirror * dist_b * kMirror;

  shoulder_rel_[0] = Rb * shoulder_b;
  elbow_rel_[0] = Rb * elbow_b;
  shoulder_rel_[1] = Rb * (kMirror * shoulder_b);
  elbow_rel_[1] = Rb * (kMirror * elbow_b);
  // Angular velocity is a pseudovector: its mirror image picks up a sign.
  shoulder_axis_[0] = Rb * shoulder_axis_b;
  elbow_axis_[0] = Rb * elbow_axis_b;
  shoulder_axis_[1] = -(Rb * (kMirror * shoulder_axis_b));
  elbow_axis_[1] = -(Rb * (kMirror * elbow_axis_b));

  origin_rel_[static_cast<int>(Body::left_proximal)] = shoulder_rel_[0];
  origin_rel_[static_cast<int>(Body::left_distal)] = elbow_rel_[0];
  origin_rel_[static_cast<int>(Body::right_proximal)] = shoulder_rel_[1];
  origin_rel_[static_cast<int>(Body::right_distal)] = elbow_rel_[1];
}

Vec3 ChainFrame::point_rel(const AttachmentPoint& point) const {
  const int b = static_cast<int>(point.body);
  return origin_rel_[b] + rotation_[b] * point.local;
}

Mat38 ChainFrame::linear_jacobian(const AttachmentPoint& point) const {
  Mat38 J = Mat38::Zero();
  const Vec3 r = point_rel(point);
  J.block<3, 3>(0, 0).setIdentity();
  for (int j = 0; j < 3; ++j) J.col(coord::kRoll + j) = euler_axes_.col(j).cross(r);
  if (is_wing(point.body)) {
    const int s = side_index(point.body);
    J.col(coord::kShoulder) = shoulder_axis_[s].cross(r - shoulder_rel_[s]);
    if (is_distal(point.body)) J.col(coord::kElbow) = elbow_axis_[s].cross(r - elbow_rel_[s]);
  }
  return J;
}

Mat38 ChainFrame::angular_jacobian(Body body) const {
  Mat38 J = Mat38::Zero();
  J.block<3, 3>(0, coord::kRoll) = euler_axes_;
  if (is_wing(body)) {
    const int s = side_index(body);
    J.col(coord::kShoulder) = shoulder_axis_[s];
    if (is_distal(body)) J.col(coord::kElbow) = elbow_axis_[s];
  }
  return J;
}

std::array<BodyPose, kBodyCount> forward_kinematics(const RobotModel& model,
                                                    const GeneralizedState& state) {
  const ChainFrame frame(model, state.q);
  std::array<BodyPose, kBodyCount> poses;
  for (int b = 0; b < kBodyCount; ++b) {
    const auto body = static_cast<Body>(b);
    poses[b].rotation = frame.rotation(body);
    poses[b].origin = frame.p() + frame.origin_rel(body);
    Vec3 com_local = Vec3::Zero();
    if (body == Body::left_proximal) com_local = model.proximal.com_m;
    if (body == Body::left_distal) com_local = model.distal.com_m;
    if (body == Body::right_proximal) com_local = kMirror * model.proximal.com_m;
    if (body == Body::right_distal) com_local = kMirror * model.distal.com_m;
    poses[b].com = frame.point({body, com_local});
  }
  return poses;
}

std::vector<ElementStation> element_stations(const RobotModel& model) {
  const int m = model.n_elements;
  const double half = 0.5 * model.span_m;
  const double dtheta = kPi / (m + 1);
  const double root = model.shoulder_position_m.y();
  std::vector<ElementStation> out;
  out.reserve(m);
  for (int i = 1; i <= m; ++i) {
    ElementStation st;
    st.theta = i * dtheta;
    st.y_m = half * std::cos(st.theta);
    st.chord_m = model.chord.at(st.y_m, model.span_m);
    st.half_chord_m = 0.5 * st.chord_m;
    st.width_m = half * std::sin(st.theta) * dtheta;
    const double tol = 1e-12 * model.span_m;
    st.side = st.y_m > tol ? 1 : (st.y_m < -tol ? -1 : 0);

    // Leading edge along the carrying frame's local y axis; quarter chord behind it.
    const double d = std::abs(st.y_m);
    const double x_qc = -0.25 * st.chord_m;
    const bool left = st.side >= 0;
    if (d < root) {
      st.attachment.body = Body::main;
      st.attachment.local = Vec3(model.shoulder_position_m.x() + x_qc, st.y_m,
                                 model.shoulder_position_m.z());
    } else if (d - root <= model.proximal.length_m) {
      st.attachment.body = left ? Body::left_proximal : Body::right_proximal;
      st.attachment.local = Vec3(x_qc, left ? d - root : -(d - root), 0.0);
    } else {
      const double s = d - root - model.proximal.length_m;
      st.attachment.body = left ? Body::left_distal : Body::right_distal;
      st.attachment.local = Vec3(x_qc, left ? s : -s, 0.0);
    }
    out.push_back(st);
  }
  return out;
}

std::vector<BladeElementState> blade_elements(const std::vector<ElementStation>& stations,
                                              const ChainFrame& frame, const Vec8& qd,
                                              const Vec3& wind) {
  std::vector<BladeElementState> out;
  out.reserve(stations.size());
  for (const auto& st : stations) {
    BladeElementState e;
    e.station = st;
    const Mat3& R = frame.rotation(st.attachment.body);
    const Mat38 Jv = frame.linear_jacobian(st.attachment);
    e.jacobian = Jv.transpose();
    e.position = frame.point(st.attachment);
    e.velocity = Jv * qd;
    e.normal = R.col(2);
    e.chord_dir = R.col(0);
    e.span_dir = R.col(1);
    e.air_velocity = wind - e.velocity;
    e.v_n = e.air_velocity.dot(e.normal);
    e.v_e = -e.air_velocity.dot(e.chord_dir);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<BladeElementState> blade_elements(const RobotModel& model,
                                              const GeneralizedState& state, const Vec3& wind) {
  const ChainFrame frame(model, state.q);
  return blade_elements(element_stations(model), frame, state.qd, wind);
}

AttachmentPoint attachment_point(const RobotModel& model, AttachmentId id) {
  if (id.kind == AttachmentId::Kind::blade_element) {
    if (id.index < 0 || id.index >= model.n_elements) {
      throw UnknownAttachmentError("no blade element with index " + std::to_string(id.index));
    }
    return element_stations(model)[id.index].attachment;
  }
  if (id.index < 0 || id.index >= static_cast<int>(model.thrusters.size())) {
    throw UnknownAttachmentError("no thruster with index " + std::to_string(id.index));
  }
  return {Body::main, model.thrusters[id.index].position_m};
}

Mat83 force_jacobian(const RobotModel& model, const GeneralizedState& state, AttachmentId id) {
  const AttachmentPoint point = attachment_point(model, id);
  return ChainFrame(model, state.q).linear_jacobian(point).transpose();
}

}  // namespace flapsim
