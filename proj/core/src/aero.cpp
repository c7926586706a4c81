#include "flapsim/aero.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "flapsim/error.hpp"

namespace flapsim {

double wagner_phi(double t_tilde, const WagnerConstants& k) {
  if (!(t_tilde >= 0.0)) {
    throw ValidationError("t_tilde", "normalized time must be >= 0 (got " +
                                         std::to_string(t_tilde) + ")");
  }
  return 1.0 - (k.psi1 * std::exp(-k.eps1 * t_tilde) + k.psi2 * std::exp(-k.eps2 * t_tilde));
}

MemoryStates memory_rates(const MemoryStates& z, const VecX& w, double U, const VecX& b,
                          const WagnerConstants& k) {
  const VecX rate1 = (k.eps1 * U) * b.cwiseInverse();
  const VecX rate2 = (k.eps2 * U) * b.cwiseInverse();
  return {(k.psi1 * rate1).cwiseProduct(w) - rate1.cwiseProduct(z.z1),
          (k.psi2 * rate2).cwiseProduct(w) - rate2.cwiseProduct(z.z2)};
}

MemoryStates advance_memory_states(const MemoryStates& z, const std::function<VecX(double)>& w_of_t,
                                   double t, double U, const VecX& b, double dt,
                                   const WagnerConstants& k) {
  const auto f = [&](double time, const MemoryStates& s) {
    return memory_rates(s, w_of_t(time), U, b, k);
  };
  const auto axpy = [](const MemoryStates& s, double h, const MemoryStates& d) {
    return MemoryStates{s.z1 + h * d.z1, s.z2 + h * d.z2};
  };
  const MemoryStates k1 = f(t, z);
  const MemoryStates k2 = f(t + 0.5 * dt, axpy(z, 0.5 * dt, k1));
  const MemoryStates k3 = f(t + 0.5 * dt, axpy(z, 0.5 * dt, k2));
  const MemoryStates k4 = f(t + dt, axpy(z, dt, k3));
  return {z.z1 + (dt / 6.0) * (k1.z1 + 2.0 * k2.z1 + 2.0 * k3.z1 + k4.z1),
          z.z2 + (dt / 6.0) * (k1.z2 + 2.0 * k2.z2 + 2.0 * k3.z2 + k4.z2)};
}

MemoryStates advance_memory_states(const MemoryStates& z, const VecX& w, double U, const VecX& b,
                                   double dt, const WagnerConstants& k) {
  return advance_memory_states(
      z, [&w](double) { return w; }, 0.0, U, b, dt, k);
}

VecX sectional_lift(const VecX& w, const VecX& z1, const VecX& z2, double U, double lift_slope,
                    const WagnerConstants& k) {
  return (lift_slope / U) * (k.phi0() * w + z1 + z2);
}

LiftingLine::LiftingLine(std::vector<double> theta, std::vector<double> chord_m,
                         double root_chord_m, double span_m, double lift_slope,
                         WagnerConstants constants)
    : theta_(std::move(theta)),
      root_chord_(root_chord_m),
      span_(span_m),
      lift_slope_(lift_slope),
      constants_(constants) {
  const auto m = static_cast<int>(theta_.size());
  if (m < 1 || static_cast<int>(chord_m.size()) != m) {
    throw CollocationError("need one chord per collocation station", 0.0);
  }
  chord_ = Eigen::Map<const VecX>(chord_m.data(), m);
  if (chord_.minCoeff() <= 0.0) throw ValidationError("chord", "collocation chord must be > 0");
  half_chord_ = 0.5 * chord_;
  root_over_chord_ = root_chord_ * chord_.cwiseInverse();
  sine_.resize(m, m);
  downwash_.resize(m, m);
  for (int i = 0; i < m; ++i) {
    const double st = std::sin(theta_[i]);
    if (!(st > 0.0)) throw CollocationError("collocation angle on a wing tip", 0.0);
    for (int n = 1; n <= m; ++n) {
      const double s = std::sin(n * theta_[i]);
      sine_(i, n - 1) = s;
      downwash_(i, n - 1) = n * s / st;
    }
  }
  Eigen::JacobiSVD<MatX> svd(sine_);
  const auto& sv = svd.singularValues();
  condition_ = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff()
                                   : std::numeric_limits<double>::infinity();
  if (!(condition_ < 1e12)) {
    throw CollocationError("collocation matrix is singular", condition_);
  }
  lu_.compute(sine_);
}

namespace {

std::vector<double> station_thetas(const std::vector<ElementStation>& s) {
  std::vector<double> out;
  for (const auto& e : s) out.push_back(e.theta);
  return out;
}

std::vector<double> station_chords(const std::vector<ElementStation>& s) {
  std::vector<double> out;
  for (const auto& e : s) out.push_back(e.chord_m);
  return out;
}

void require_freestream(double U) {
  if (!(U > 0.0)) {
    throw FreestreamError("lifting-line model needs a positive freestream speed (got " +
                          std::to_string(U) + " m/s)");
  }
}

}  // namespace

LiftingLine::LiftingLine(const RobotModel& model, const std::vector<ElementStation>& stations)
    : LiftingLine(station_thetas(stations), station_chords(stations), model.root_chord_m(),
                  model.span_m, model.lift_slope_per_rad) {}

VecX LiftingLine::induced_downwash(const VecX& a, double U) const {
  require_freestream(U);
  return -(lift_slope_ * root_chord_ * U / (4.0 * span_)) * (downwash_ * a);
}

VecX LiftingLine::fourier_rates(const VecX& a, const VecX& cl, double U) const {
  require_freestream(U);
  const VecX rhs = cl - lift_slope_ * root_over_chord_.cwiseProduct(sine_ * a);
  return (U / (lift_slope_ * root_chord_)) * lu_.solve(rhs);
}

VecX LiftingLine::fourier_lift(const VecX& a, const VecX& adot, double U) const {
  return lift_slope_ *
         (root_over_chord_.cwiseProduct(sine_ * a) + (root_chord_ / U) * (sine_ * adot));
}

double LiftingLine::collocation_residual(const VecX& a, const VecX& adot, const VecX& cl,
                                         double U) const {
  const double scale = std::max({cl.norm(), fourier_lift(a, VecX::Zero(a.size()), U).norm(),
                                 std::numeric_limits<double>::min()});
  return (fourier_lift(a, adot, U) - cl).norm() / scale;
}

LiftingLine::Rates LiftingLine::derivative(const AeroState& s, const VecX& v_n, double U) const {
  Rates r;
  r.w_induced = induced_downwash(s.a, U);
  r.w_total = v_n + r.w_induced;
  r.cl = sectional_lift(r.w_total, s.z1, s.z2, U, lift_slope_, constants_);
  const VecX adot = fourier_rates(s.a, r.cl, U);
  r.residual = collocation_residual(s.a, adot, r.cl, U);
  const MemoryStates zdot = memory_rates({s.z1, s.z2}, r.w_total, U, half_chord_, constants_);
  r.rates = {adot, zdot.z1, zdot.z2};
  return r;
}

VecX quasi_steady_baseline(const std::vector<BladeElementState>& elements,
                           const RobotModel& model) {
  VecX cl(static_cast<Eigen::Index>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    cl[static_cast<Eigen::Index>(i)] =
        model.lift_slope_per_rad * std::atan2(elements[i].v_n, elements[i].v_e);
  }
  return cl;
}

ElementForces assemble_forces(const VecX& cl, const std::vector<BladeElementState>& elements,
                              const RobotModel& model, const VecX& w_induced) {
  ElementForces out;
  out.force.assign(elements.size(), Vec3::Zero());
  const bool tilt = w_induced.size() == static_cast<Eigen::Index>(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    const Vec3& span = e.span_dir;
    const Vec3 flow = e.air_velocity - e.air_velocity.dot(span) * span;
    const double speed = flow.norm();
    if (speed < 1e-12) continue;
    const Vec3 drag_dir = flow / speed;
    const Vec3 lift_dir = span.cross(drag_dir);
    const double qbar_area =
        0.5 * model.air_density_kgm3 * speed * speed * e.station.chord_m * e.station.width_m;
    const double lift = qbar_area * cl[static_cast<Eigen::Index>(i)];
    const double induced_angle =
        tilt ? std::atan2(-w_induced[static_cast<Eigen::Index>(i)], speed) : 0.0;
    const Vec3 f = lift * (std::cos(induced_angle) * lift_dir + std::sin(induced_angle) * drag_dir) +
                   qbar_area * model.profile_drag_coeff * drag_dir;
    out.force[i] = f;
    out.generalized += e.jacobian * f;
  }
  return out;
}

}  // namespace flapsim
