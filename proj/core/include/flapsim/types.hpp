#pragma once

#include <Eigen/Dense>

namespace flapsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat38 = Eigen::Matrix<double, 3, 8>;
/// Maps an inertial force at a point to generalized forces.
using Mat83 = Eigen::Matrix<double, 8, 3>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Layout of the generalized coordinate vector q = [p, roll, pitch, yaw, q_s, q_e].
namespace coord {
inline constexpr int kPx = 0;
inline constexpr int kPy = 1;
inline constexpr int kPz = 2;
inline constexpr int kRoll = 3;
inline constexpr int kPitch = 4;
inline constexpr int kYaw = 5;
inline constexpr int kShoulder = 6;
inline constexpr int kElbow = 7;
inline constexpr int kCount = 8;
inline constexpr int kBodyCount = 6;
}  // namespace coord

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace flapsim
