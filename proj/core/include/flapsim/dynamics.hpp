#pragma once

#include <optional>

#include <array>
#include <vector>

#include "flapsim/aero.hpp"
#include "flapsim/control.hpp"
#include "flapsim/gait.hpp"
#include "flapsim/kinematics.hpp"
#include "flapsim/model.hpp"
#include "flapsim/scenario.hpp"
#include "flapsim/types.hpp"

namespace flapsim {

/// Terms of M(q) qdd = h(q, qd) + u_a + u_t + J_c^T lambda, J_c qdd = y_ks.
struct EomTerms {
  Mat8 M = Mat8::Identity();
  Vec8 h = Vec8::Zero();
  Eigen::Matrix<double, 2, 8> Jc = Eigen::Matrix<double, 2, 8>::Zero();
  Vec8 u_a = Vec8::Zero();
  Vec8 u_t = Vec8::Zero();
};

/// Selector rows picking (qdd_s, qdd_e).
Eigen::Matrix<double, 2, 8> joint_selector();

/// M = sum over bodies of Jv^T m Jv + Jw^T (R I R^T) Jw.
Mat8 mass_matrix(const RobotModel& model, const Vec8& q);
Mat8 mass_matrix(const RobotModel& model, const ChainFrame& frame);

/// h = -(Mdot qd - 1/2 d(qd^T M qd)/dq) - dV/dq, with dM/dq by central
/// differences (step 1e-6) and V the gravitational potential.
Vec8 bias_forces(const RobotModel& model, const Vec8& q, const Vec8& qd);
Vec8 gravity_forces(const RobotModel& model, const ChainFrame& frame);

/// Kinetic plus gravitational potential energy (reference z = 0).
double total_energy(const RobotModel& model, const GeneralizedState& state);

struct ConstrainedAccel {
  VecX qdd;
  VecX lambda;
  double residual = 0.0;  // ||J_c qdd - y||
};

/// lambda = (J M^-1 J^T)^-1 (y - J M^-1 f), qdd = M^-1 (f + J^T lambda)
/// where f = h + u. Throws ConstraintError if M is not SPD or the Gram
/// matrix is singular.
ConstrainedAccel solve_constrained_accel(const MatX& M, const VecX& f, const MatX& Jc,
                                         const VecX& y);
ConstrainedAccel solve_constrained_accel(const EomTerms& terms, const Vec2& y_ks);

struct FullState {
  GeneralizedState gen;
  AeroState aero;
  double time = 0.0;
};

struct SimOptions {
  Mode mode = Mode::tethered;
  AeroModel aero_model = AeroModel::unsteady;
  Vec3 wind_mps = Vec3::Zero();
  double freestream_floor_mps = 0.1;
};

/// Everything computed at one evaluation of the coupled right-hand side.
struct Evaluation {
  Vec8 qdd = Vec8::Zero();
  Vec2 lambda = Vec2::Zero();
  double constraint_residual = 0.0;
  double collocation_residual = 0.0;
  double freestream_mps = 0.0;
  AeroState aero_rates;
  VecX cl;
  VecX w_induced;
  std::vector<Vec3> element_force;
  std::vector<int> element_side;
  Vec8 u_a = Vec8::Zero();
  Vec8 u_t = Vec8::Zero();
  Vec3 aero_force = Vec3::Zero();  // total aerodynamic force, inertial
  double lift_left_n = 0.0, lift_right_n = 0.0;
  double drag_left_n = 0.0, drag_right_n = 0.0;
  /// Tethered mode: force and torque the mount applies to the body (inertial).
  Vec3 mount_force_n = Vec3::Zero();
  Vec3 mount_torque_nm = Vec3::Zero();
};

/// Coupled multibody + aerodynamics stepper for one vehicle instance.
class Simulator {
 public:
  Simulator(RobotModel model, GaitSchedule gait, SimOptions options);

  const RobotModel& model() const noexcept { return model_; }
  const GaitSchedule& gait() const noexcept { return gait_; }
  const SimOptions& options() const noexcept { return options_; }
  const std::vector<ElementStation>& stations() const noexcept { return stations_; }
  const LiftingLine& lifting_line() const noexcept { return lifting_line_; }

  /// Body pose/rates from `initial`, joints on the gait at t = 0, zero wake.
  FullState initial_state(const InitialConditions& initial) const;

  Evaluation evaluate(const FullState& state, const ThrusterCommand& thrust = {}) const;

  /// One RK4 step. Joint coordinates are re-synchronized to the gait after
  /// the step. Returns the evaluation at the pre-step state. Throws
  /// DivergenceError for non-finite results.
  /// `end_time`, when given, replaces state.time + dt so long runs can use
  /// step-count times without accumulated rounding.
  Evaluation step(FullState& state, const ThrusterCommand& thrust, double dt,
                  std::optional<double> end_time = std::nullopt);

  /// Largest constraint residual seen at any RK4 stage so far.
  double max_constraint_residual() const noexcept { return max_residual_; }

  static constexpr int kGeneralizedSize = 16;
  VecX pack(const FullState& state) const;
  void unpack(const VecX& x, FullState& state) const;
  std::string component_name(int index) const;

 private:
  Evaluation evaluate_packed(double t, const VecX& x, const ThrusterCommand& thrust,
                             VecX* derivative) const;

  RobotModel model_;
  GaitSchedule gait_;
  SimOptions options_;
  std::vector<ElementStation> stations_;
  LiftingLine lifting_line_;
  double max_residual_ = 0.0;
};

}  // namespace flapsim
