#include "flapsim/dynamics.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "flapsim/error.hpp"
#include "flapsim/integrator.hpp"

namespace flapsim {

namespace {

const Mat3 kMirror = Vec3(1.0, -1.0, 1.0).asDiagonal();

struct BodyInertia {
  Body body;
  double mass;
  Vec3 com_local;
  Mat3 inertia_local;
};

std::array<BodyInertia, kBodyCount> body_inertias(const RobotModel& m) {
  return {{
      {Body::main, m.body_mass_kg, Vec3::Zero(), m.body_inertia_kgm2},
      {Body::left_proximal, m.proximal.mass_kg, m.proximal.com_m, m.proximal.inertia_kgm2},
      {Body::left_distal, m.distal.mass_kg, m.distal.com_m, m.distal.inertia_kgm2},
      {Body::right_proximal, m.proximal.mass_kg, kMirror * m.proximal.com_m,
       kMirror * m.proximal.inertia_kgm2 * kMirror},
      {Body::right_distal, m.distal.mass_kg, kMirror * m.distal.com_m,
       kMirror * m.distal.inertia_kgm2 * kMirror},
  }};
}

constexpr double kChristoffelStep = 1e-6;

/// dM/dq_k for the orientation and joint coordinates; M does not depend on p.
std::array<Mat8, coord::kCount> mass_matrix_gradient(const RobotModel& model, const Vec8& q) {
  std::array<Mat8, coord::kCount> dM;
  for (int k = 0; k < coord::kCount; ++k) {
    if (k < coord::kRoll) {
      dM[k].setZero();
      continue;
    }
    Vec8 qp = q, qm = q;
    qp[k] += kChristoffelStep;
    qm[k] -= kChristoffelStep;
    dM[k] = (mass_matrix(model, qp) - mass_matrix(model, qm)) / (2.0 * kChristoffelStep);
  }
  return dM;
}

Vec8 bias_from(const RobotModel& model, const ChainFrame& frame, const Vec8& q, const Vec8& qd) {
  Vec8 h = gravity_forces(model, frame);
  if (qd.tail<5>().isZero(0.0)) return h;  // velocity terms vanish
  const auto dM = mass_matrix_gradient(model, q);
  Mat8 Mdot = Mat8::Zero();
  Vec8 grad = Vec8::Zero();
  for (int k = coord::kRoll; k < coord::kCount; ++k) {
    Mdot += dM[k] * qd[k];
    grad[k] = 0.5 * qd.dot(dM[k] * qd);
  }
  h += grad - Mdot * qd;
  return h;
}

}  // namespace

Eigen::Matrix<double, 2, 8> joint_selector() {
  Eigen::Matrix<double, 2, 8> J = Eigen::Matrix<double, 2, 8>::Zero();
  J(0, coord::kShoulder) = 1.0;
  J(1, coord::kElbow) = 1.0;
  return J;
}

Mat8 mass_matrix(const RobotModel& model, const ChainFrame& frame) {
  Mat8 M = Mat8::Zero();
  for (const auto& b : body_inertias(model)) {
    const Mat38 Jv = frame.linear_jacobian({b.body, b.com_local});
    const Mat38 Jw = frame.angular_jacobian(b.body);
    const Mat3& R = frame.rotation(b.body);
    const Mat3 I = R * b.inertia_local * R.transpose();
    M.noalias() += b.mass * Jv.transpose() * Jv;
    M.noalias() += Jw.transpose() * I * Jw;
  }
  return 0.5 * (M + M.transpose());
}

Mat8 mass_matrix(const RobotModel& model, const Vec8& q) {
  return mass_matrix(model, ChainFrame(model, q));
}

Vec8 gravity_forces(const RobotModel& model, const ChainFrame& frame) {
  Vec8 g = Vec8::Zero();
  const Vec3 weight_dir(0.0, 0.0, -model.gravity_mps2);
  for (const auto& b : body_inertias(model)) {
    g.noalias() += frame.linear_jacobian({b.body, b.com_local}).transpose() * (b.mass * weight_dir);
  }
  return g;
}

Vec8 bias_forces(const RobotModel& model, const Vec8& q, const Vec8& qd) {
  return bias_from(model, ChainFrame(model, q), q, qd);
}

double total_energy(const RobotModel& model, const GeneralizedState& state) {
  const ChainFrame frame(model, state.q);
  double potential = 0.0;
  for (const auto& b : body_inertias(model)) {
    potential += b.mass * model.gravity_mps2 * frame.point({b.body, b.com_local}).z();
  }
  return 0.5 * state.qd.dot(mass_matrix(model, frame) * state.qd) + potential;
}

ConstrainedAccel solve_constrained_accel(const MatX& M, const VecX& f, const MatX& Jc,
                                         const VecX& y) {
  Eigen::LLT<MatX> llt(M);
  if (llt.info() != Eigen::Success) {
    throw ConstraintError("mass matrix is not symmetric positive definite");
  }
  const MatX MinvJt = llt.solve(Jc.transpose());
  const VecX Minvf = llt.solve(f);
  const MatX gram = Jc * MinvJt;
  Eigen::FullPivLU<MatX> gram_lu(gram);
  if (!gram_lu.isInvertible()) {
    throw ConstraintError("constraint Gram matrix J M^-1 J^T is singular");
  }
  ConstrainedAccel out;
  out.lambda = gram_lu.solve(y - Jc * Minvf);
  out.qdd = Minvf + MinvJt * out.lambda;
  out.residual = (Jc * out.qdd - y).norm();
  return out;
}

ConstrainedAccel solve_constrained_accel(const EomTerms& t, const Vec2& y_ks) {
  return solve_constrained_accel(t.M, t.h + t.u_a + t.u_t, t.Jc, y_ks);
}

Simulator::Simulator(RobotModel model, GaitSchedule gait, SimOptions options)
    : model_(std::move(model)),
      gait_(std::move(gait)),
      options_(options),
      stations_(element_stations(model_)),
      lifting_line_(model_, stations_) {}

FullState Simulator::initial_state(const InitialConditions& init) const {
  FullState s;
  const JointState js = gait_eval(gait_, 0.0);
  s.gen.q << init.position_m, init.attitude_rad, js.position;
  s.gen.qd << init.velocity_mps, init.euler_rates_radps, js.velocity;
  if (options_.mode == Mode::tethered) s.gen.qd.head<6>().setZero();
  s.aero = AeroState::zero(model_.n_elements);
  s.time = 0.0;
  return s;
}

VecX Simulator::pack(const FullState& s) const {
  const int m = model_.n_elements;
  VecX x(kGeneralizedSize + 3 * m);
  x << s.gen.q, s.gen.qd, s.aero.a, s.aero.z1, s.aero.z2;
  return x;
}

void Simulator::unpack(const VecX& x, FullState& s) const {
  const int m = model_.n_elements;
  s.gen.q = x.segment<8>(0);
  s.gen.qd = x.segment<8>(8);
  s.aero.a = x.segment(16, m);
  s.aero.z1 = x.segment(16 + m, m);
  s.aero.z2 = x.segment(16 + 2 * m, m);
}

std::string Simulator::component_name(int index) const {
  static const char* names[] = {"x", "y", "z", "roll", "pitch", "yaw", "q_s", "q_e"};
  const int m = model_.n_elements;
  if (index < 8) return std::string("q.") + names[index];
  if (index < 16) return std::string("qd.") + names[index - 8];
  const int j = index - 16;
  const char* group = j < m ? "a" : (j < 2 * m ? "z1" : "z2");
  return std::string(group) + "[" + std::to_string(j % m) + "]";
}

Evaluation Simulator::evaluate(const FullState& state, const ThrusterCommand& thrust) const {
  return evaluate_packed(state.time, pack(state), thrust, nullptr);
}

Evaluation Simulator::evaluate_packed(double t, const VecX& x, const ThrusterCommand& thrust,
                                      VecX* derivative) const {
  const int m = model_.n_elements;
  const bool tethered = options_.mode == Mode::tethered;
  Vec8 q = x.segment<8>(0);
  Vec8 qd = x.segment<8>(8);
  if (tethered) qd.head<6>().setZero();

  Evaluation ev;
  const ChainFrame frame(model_, q);
  const auto elements = blade_elements(stations_, frame, qd, options_.wind_mps);
  const Vec3 freestream = options_.wind_mps - qd.head<3>();
  ev.freestream_mps = freestream.norm();

  ev.aero_rates = AeroState::zero(m);
  ev.cl = VecX::Zero(m);
  switch (options_.aero_model) {
    case AeroModel::unsteady: {
      if (ev.freestream_mps < options_.freestream_floor_mps) {
        throw FreestreamError("freestream " + std::to_string(ev.freestream_mps) +
                              " m/s below the unsteady-model floor at t=" + std::to_string(t) +
                              " s");
      }
      const AeroState aero{x.segment(16, m), x.segment(16 + m, m), x.segment(16 + 2 * m, m)};
      VecX v_n(m);
      for (int i = 0; i < m; ++i) v_n[i] = elements[i].v_n;
      auto rates = lifting_line_.derivative(aero, v_n, ev.freestream_mps);
      ev.aero_rates = std::move(rates.rates);
      ev.cl = std::move(rates.cl);
      ev.w_induced = std::move(rates.w_induced);
      ev.collocation_residual = rates.residual;
      break;
    }
    case AeroModel::quasi_steady:
      ev.cl = quasi_steady_baseline(elements, model_);
      break;
    case AeroModel::off:
      break;
  }

  if (options_.aero_model != AeroModel::off) {
    auto forces = assemble_forces(ev.cl, elements, model_, ev.w_induced);
    ev.u_a = forces.generalized;
    ev.element_force = std::move(forces.force);
  } else {
    ev.element_force.assign(m, Vec3::Zero());
  }
  const Vec3 drag_dir = ev.freestream_mps > 1e-9 ? Vec3(freestream / ev.freestream_mps)
                                                 : Vec3(-Vec3::UnitX());
  ev.element_side.resize(m);
  for (int i = 0; i < m; ++i) {
    const Vec3& f = ev.element_force[i];
    const int side = elements[i].station.side;
    ev.element_side[i] = side;
    ev.aero_force += f;
    const double share = side == 0 ? 0.5 : 1.0;
    if (side >= 0) {
      ev.lift_left_n += share * f.z();
      ev.drag_left_n += share * f.dot(drag_dir);
    }
    if (side <= 0) {
      ev.lift_right_n += share * f.z();
      ev.drag_right_n += share * f.dot(drag_dir);
    }
  }

  const Mat3& Rb = frame.rotation(Body::main);
  for (std::size_t i = 0; i < thrust.thrust_n.size() && i < model_.thrusters.size(); ++i) {
    const auto& th = model_.thrusters[i];
    const Vec3 f = thrust.thrust_n[i] * (Rb * th.axis);
    ev.u_t.noalias() += frame.linear_jacobian({Body::main, th.position_m}).transpose() * f;
  }

  const Mat8 M = mass_matrix(model_, frame);
  const Vec8 h = bias_from(model_, frame, q, qd);
  const Vec2 y = gait_eval(gait_, t).acceleration;
  const Vec8 f = h + ev.u_a + ev.u_t;

  if (tethered) {
    ev.qdd.setZero();
    ev.qdd.tail<2>() = y;
    const Vec8 generalized_reaction = M * ev.qdd - f;
    ev.lambda = generalized_reaction.tail<2>();
    ev.mount_force_n = generalized_reaction.head<3>();
    ev.mount_torque_nm =
        frame.euler_axes().transpose().lu().solve(generalized_reaction.segment<3>(coord::kRoll));
    ev.constraint_residual = 0.0;
  } else {
    const auto sol = solve_constrained_accel(M, f, joint_selector(), y);
    ev.qdd = sol.qdd;
    ev.lambda = sol.lambda;
    ev.constraint_residual = sol.residual;
  }

  if (derivative) {
    VecX& d = *derivative;
    d.resize(x.size());
    d.segment<8>(0) = qd;
    d.segment<8>(8) = ev.qdd;
    d.segment(16, m) = ev.aero_rates.a;
    d.segment(16 + m, m) = ev.aero_rates.z1;
    d.segment(16 + 2 * m, m) = ev.aero_rates.z2;
  }
  return ev;
}

Evaluation Simulator::step(FullState& state, const ThrusterCommand& thrust, double dt,
                           std::optional<double> end_time) {
  const VecX x = pack(state);
  const double t = state.time;
  Evaluation first;
  bool have_first = false;
  const auto first_nonfinite = [](const VecX& v) -> Eigen::Index {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) return i;
    }
    return -1;
  };
  const auto f = [&](double time, const VecX& xs) {
    if (const auto bad = first_nonfinite(xs); bad >= 0) {
      throw DivergenceError(time, component_name(static_cast<int>(bad)));
    }
    VecX d;
    Evaluation ev = evaluate_packed(time, xs, thrust, &d);
    if (const auto bad = first_nonfinite(d); bad >= 0) {
      throw DivergenceError(time, "rate of " + component_name(static_cast<int>(bad)));
    }
    max_residual_ = std::max(max_residual_, ev.constraint_residual);
    if (!have_first) {
      first = std::move(ev);
      have_first = true;
    }
    return d;
  };
  const VecX next = rk4_step(x, t, dt, f);

  if (const auto bad = first_nonfinite(next); bad >= 0) {
    throw DivergenceError(t + dt, component_name(static_cast<int>(bad)));
  }
  unpack(next, state);
  state.time = end_time.value_or(t + dt);
  // Re-synchronize the joints to the prescribed gait to remove drift.
  const JointState js = gait_eval(gait_, state.time);
  state.gen.q.tail<2>() = js.position;
  state.gen.qd.tail<2>() = js.velocity;
  return first;
}

}  // namespace flapsim
