#include <maskrl/envs/quadrotor.hpp>

#include <maskrl/envs/seeker.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskrl {

// The printed derivative lists (ẍ, z̈) before θ̇; each expression is placed
// in the slot of the state it differentiates.
Vector Quad2dDynamics::derivative(const Vector& s, const Vector& a, const Vector& w) const {
  const double thrust = (a(0) + a(1)) * k;
  Vector d(6);
  d << s(2), s(3), thrust * std::sin(s(4)) + w(0), -g + thrust * std::cos(s(4)) + w(1), s(5),
      -d0 * s(4) - d1 * s(5) + n0 * (-a(0) + a(1));
  return d;
}

Matrix Quad2dDynamics::state_jacobian(const Vector& s, const Vector& a, const Vector&) const {
  const double thrust = (a(0) + a(1)) * k;
  Matrix j = Matrix::Zero(6, 6);
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(2, 4) = thrust * std::cos(s(4));
  j(3, 4) = -thrust * std::sin(s(4));
  j(4, 5) = 1.0;
  j(5, 4) = -d0;
  j(5, 5) = -d1;
  return j;
}

Matrix Quad2dDynamics::action_jacobian(const Vector& s, const Vector&, const Vector&) const {
  Matrix j = Matrix::Zero(6, 2);
  j(2, 0) = j(2, 1) = k * std::sin(s(4));
  j(3, 0) = j(3, 1) = k * std::cos(s(4));
  j(5, 0) = -n0;
  j(5, 1) = n0;
  return j;
}

Matrix Quad2dDynamics::disturbance_jacobian(const Vector&, const Vector&, const Vector&) const {
  Matrix j = Matrix::Zero(6, 2);
  j(2, 0) = 1.0;
  j(3, 1) = 1.0;
  return j;
}

Vector Quad3dDynamics::derivative(const Vector& s, const Vector& a, const Vector&) const {
  Vector d(12);
  d << s(3), s(4), s(5), -9.81 * s(7), 9.81 * s(6), a(0), s(9), s(10), s(11), a(1), a(2), a(3);
  return d;
}

Matrix Quad3dDynamics::state_jacobian(const Vector&, const Vector&, const Vector&) const {
  Matrix j = Matrix::Zero(12, 12);
  for (int i = 0; i < 3; ++i) j(i, 3 + i) = 1.0;
  j(3, 7) = -9.81;
  j(4, 6) = 9.81;
  for (int i = 0; i < 3; ++i) j(6 + i, 9 + i) = 1.0;
  return j;
}

Matrix Quad3dDynamics::action_jacobian(const Vector&, const Vector&, const Vector&) const {
  Matrix j = Matrix::Zero(12, 4);
  j(5, 0) = 1.0;
  j(9, 1) = 1.0;
  j(10, 2) = 1.0;
  j(11, 3) = 1.0;
  return j;
}

Matrix Quad3dDynamics::disturbance_jacobian(const Vector&, const Vector&, const Vector&) const {
  return Matrix(12, 0);
}

IntervalBox quad2d_action_box() { return {Vector::Constant(2, 6.83), Vector::Constant(2, 8.59)}; }

IntervalBox quad2d_state_box() {
  const double pi = std::numbers::pi;
  return {Vector{{-1.7, 0.3, -0.8, -1.0, -pi / 12, -pi / 2}}, Vector{{1.7, 2.0, 0.8, 1.0, pi / 12, pi / 2}}};
}

Zonotope quad2d_disturbance_set() { return Zonotope(Vector::Zero(2), 0.08 * Matrix::Identity(2, 2)); }

IntervalBox quad3d_action_box() { return {Vector{{-9.81, -0.5, -0.5, -0.5}}, Vector{{2.38, 0.5, 0.5, 0.5}}}; }

IntervalBox quad3d_state_box() {
  const double pi = std::numbers::pi;
  Vector hi(12);
  hi << 3, 3, 3, 3, 3, 3, pi / 4, pi / 4, pi, 3, 3, 3;
  return {-hi, hi};
}

QuadrotorEnv::QuadrotorEnv(EnvKind kind, QuadConfig config) : kind_(kind), config_(config) {
  if (!(config_.dt > 0.0) || config_.horizon < 1 || config_.substeps < 1 ||
      !(config_.reset_scale > 0.0 && config_.reset_scale <= 1.0))
    throw std::invalid_argument("QuadrotorEnv: invalid configuration");
  switch (kind) {
    case EnvKind::quad2d:
      model_ = std::make_shared<Quad2dDynamics>();
      action_box_ = quad2d_action_box();
      state_box_ = quad2d_state_box();
      disturbance_ = quad2d_disturbance_set();
      break;
    case EnvKind::quad3d:
      model_ = std::make_shared<Quad3dDynamics>();
      action_box_ = quad3d_action_box();
      state_box_ = quad3d_state_box();
      disturbance_ = Zonotope::point(Vector::Zero(0));
      break;
    default:
      throw std::invalid_argument("QuadrotorEnv: not a quadrotor kind");
  }
  state_ = state_box_.center();
}

std::unique_ptr<Environment> QuadrotorEnv::clone() const { return std::make_unique<QuadrotorEnv>(*this); }

void QuadrotorEnv::set_state(const Vector& s) {
  if (s.size() != model_->state_dim() || !s.allFinite()) throw std::invalid_argument("QuadrotorEnv::set_state: bad state");
  state_ = s;
  steps_ = 0;
}

Vector QuadrotorEnv::reset(Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Vector c = state_box_.center();
  const Vector r = config_.reset_scale * state_box_.radius();
  Vector s(c.size());
  for (Index i = 0; i < s.size(); ++i) s(i) = c(i) + r(i) * unit(rng);
  set_state(s);
  return observation();
}

double QuadrotorEnv::reward(const Vector& next, const Vector& action) const {
  const Vector range = action_box_.upper() - action_box_.lower();
  const double effort = ((action - action_box_.lower()).array() / range.array()).abs().sum();
  return std::exp(-next.norm() - 0.005 * effort);
}

StepResult QuadrotorEnv::step(const Vector& action, Rng& rng) {
  Vector w = Vector::Zero(model_->disturbance_dim());
  if (w.size() > 0) {
    const IntervalBox wbox = interval_hull(disturbance_);
    for (Index i = 0; i < w.size(); ++i)
      w(i) = std::uniform_real_distribution<double>(wbox.lower()(i), wbox.upper()(i))(rng);
  }
  return step_with_disturbance(action, w);
}

StepResult QuadrotorEnv::step_with_disturbance(const Vector& action, const Vector& w) {
  if (action.size() != model_->action_dim() || !action.allFinite())
    throw std::invalid_argument("QuadrotorEnv::step: bad action");
  if (!action_box_.contains(action, kActionSlack * (1.0 + action.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("QuadrotorEnv::step: action outside the action box");
  if (w.size() != model_->disturbance_dim()) throw std::invalid_argument("QuadrotorEnv::step: bad disturbance");
  Vector next = state_;
  const double h = config_.dt / config_.substeps;
  for (int i = 0; i < config_.substeps; ++i) next = rk4_step(*model_, next, action, w, h);
  StepResult out;
  out.reward = reward(next, action_box_.clamp(action));
  state_ = next;
  ++steps_;
  out.collision = !state_box_.contains(next) || !next.allFinite();
  out.terminated = out.collision;
  out.truncated = !out.terminated && steps_ >= config_.horizon;
  out.observation = observation();
  return out;
}

std::unique_ptr<Environment> make_environment(EnvKind kind) {
  if (kind == EnvKind::seeker) return std::make_unique<SeekerEnv>();
  return std::make_unique<QuadrotorEnv>(kind);
}

}  // namespace maskrl
