#pragma once

#include <functional>
#include <vector>

#include <Eigen/LU>

#include "flapsim/kinematics.hpp"
#include "flapsim/model.hpp"
#include "flapsim/types.hpp"

namespace flapsim {

/// Jones' two-exponential approximation of the Wagner function.
struct WagnerConstants {
  double psi1 = 0.165;
  double psi2 = 0.335;
  double eps1 = 0.0455;
  double eps2 = 0.3;

  double phi0() const noexcept { return 1.0 - (psi1 + psi2); }
};

/// Phi(t~) = 1 - psi1 exp(-eps1 t~) - psi2 exp(-eps2 t~). Rejects t~ < 0.
double wagner_phi(double t_tilde, const WagnerConstants& k = {});

/// Fourier coefficients of the circulation and the two Duhamel memory
/// states per blade element (3m values in total).
struct AeroState {
  VecX a;
  VecX z1;
  VecX z2;

  static AeroState zero(int m) { return {VecX::Zero(m), VecX::Zero(m), VecX::Zero(m)}; }
  int size() const { return static_cast<int>(a.size()); }
};

struct MemoryStates {
  VecX z1;
  VecX z2;
};

/// dz_k/dt = (psi_k eps_k U / b) w - (eps_k U / b) z_k, elementwise.
MemoryStates memory_rates(const MemoryStates& z, const VecX& w, double U, const VecX& half_chord,
                          const WagnerConstants& k = {});

/// One RK4 step of the memory states with downwash given as a function of time.
MemoryStates advance_memory_states(const MemoryStates& z, const std::function<VecX(double)>& w_of_t,
                                   double t, double U, const VecX& half_chord, double dt,
                                   const WagnerConstants& k = {});
/// Same with the downwash held constant over the step.
MemoryStates advance_memory_states(const MemoryStates& z, const VecX& w, double U,
                                   const VecX& half_chord, double dt,
                                   const WagnerConstants& k = {});

/// c_L = (a0 / U) (w Phi(0) + z1 + z2)
VecX sectional_lift(const VecX& w, const VecX& z1, const VecX& z2, double U, double lift_slope,
                    const WagnerConstants& k = {});

/// Unsteady lifting line over m collocation stations with an m-term sine
/// series for the circulation.
class LiftingLine {
 public:
  LiftingLine(std::vector<double> theta, std::vector<double> chord_m, double root_chord_m,
              double span_m, double lift_slope, WagnerConstants constants = {});
  LiftingLine(const RobotModel& model, const std::vector<ElementStation>& stations);

  int size() const noexcept { return static_cast<int>(theta_.size()); }
  const WagnerConstants& constants() const noexcept { return constants_; }
  const VecX& half_chord() const noexcept { return half_chord_; }
  double lift_slope() const noexcept { return lift_slope_; }
  /// 2-norm condition number of the sin(n theta_i) collocation matrix.
  double condition_estimate() const noexcept { return condition_; }

  /// w_y(theta_i) = -(a0 c0 U / 4S) sum_n n a_n sin(n theta_i) / sin(theta_i).
  /// Throws FreestreamError for U <= 0.
  VecX induced_downwash(const VecX& a, double U) const;

  /// Solves a0 sum_n [(c0/c_i) a_n + (c0/U) adot_n] sin(n theta_i) = cl_i for adot.
  VecX fourier_rates(const VecX& a, const VecX& cl, double U) const;
  /// Relative residual of the collocation system at (a, adot).
  double collocation_residual(const VecX& a, const VecX& adot, const VecX& cl, double U) const;

  /// Spanwise lift coefficient implied by the Fourier series.
  VecX fourier_lift(const VecX& a, const VecX& adot, double U) const;

  struct Rates {
    AeroState rates;
    VecX w_induced;
    VecX w_total;
    VecX cl;
    double residual = 0.0;
  };
  /// Time derivative of the full aerodynamic state for kinematic normal velocity v_n.
  Rates derivative(const AeroState& state, const VecX& v_n, double U) const;

 private:
  std::vector<double> theta_;
  VecX chord_;
  VecX half_chord_;
  double root_chord_;
  double span_;
  double lift_slope_;
  WagnerConstants constants_;
  MatX sine_;       // sin(n theta_i)
  MatX downwash_;   // n sin(n theta_i) / sin(theta_i)
  VecX root_over_chord_;
  Eigen::PartialPivLU<MatX> lu_;
  double condition_ = 0.0;
};

/// Labeled stand-in for a quasi-steady model: c_L = a0 * atan2(v_n, v_e).
VecX quasi_steady_baseline(const std::vector<BladeElementState>& elements,
                           const RobotModel& model);

struct ElementForces {
  std::vector<Vec3> force;  // inertial, applied at the quarter chord
  Vec8 generalized = Vec8::Zero();
};

/// Strip forces from sectional lift coefficients. Lift is
/// 0.5 rho V^2 c dy c_L normal to the relative flow in the plane normal to
/// the span; the force is tilted back by the induced angle atan(-w_y / V)
/// and a profile drag term is added along the flow.
ElementForces assemble_forces(const VecX& cl, const std::vector<BladeElementState>& elements,
                              const RobotModel& model, const VecX& w_induced = VecX());

}  // namespace flapsim
