#include <maskrl/envs/seeker.hpp>

#include <algorithm>
#include <stdexcept>

namespace maskrl {

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::seeker:
      return "seeker";
    case EnvKind::quad2d:
      return "quad2d";
    case EnvKind::quad3d:
      return "quad3d";
  }
  return "unknown";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "seeker") return EnvKind::seeker;
  if (name == "quad2d") return EnvKind::quad2d;
  if (name == "quad3d") return EnvKind::quad3d;
  throw std::invalid_argument("unknown environment '" + name + "' (expected seeker, quad2d or quad3d)");
}

Vector rk4_step(const DynamicsModel& model, const Vector& s, const Vector& a, const Vector& w, double dt) {
  const Vector k1 = model.derivative(s, a, w);
  const Vector k2 = model.derivative(s + 0.5 * dt * k1, a, w);
  const Vector k3 = model.derivative(s + 0.5 * dt * k2, a, w);
  const Vector k4 = model.derivative(s + dt * k3, a, w);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector SeekerDynamics::derivative(const Vector&, const Vector& a, const Vector&) const { return a; }
Matrix SeekerDynamics::state_jacobian(const Vector&, const Vector&, const Vector&) const { return Matrix::Zero(2, 2); }
Matrix SeekerDynamics::action_jacobian(const Vector&, const Vector&, const Vector&) const {
  return Matrix::Identity(2, 2);
}
Matrix SeekerDynamics::disturbance_jacobian(const Vector&, const Vector&, const Vector&) const { return Matrix(2, 0); }

double segment_distance(const Vector& p, const Vector& a, const Vector& b) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

SeekerEnv::SeekerEnv(SeekerConfig config)
    : config_(config),
      action_box_(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)),
      state_box_(Vector::Constant(2, -config.bound), Vector::Constant(2, config.bound)) {
  if (!(config_.dt > 0.0) || config_.horizon < 1 || !(config_.goal_radius > 0.0) || !(config_.bound > 0.0))
    throw std::invalid_argument("SeekerEnv: invalid configuration");
  if (!(config_.min_obstacle_radius > 0.0) || config_.max_obstacle_radius < config_.min_obstacle_radius)
    throw std::invalid_argument("SeekerEnv: invalid obstacle radius range");
}

void SeekerEnv::set_scene(const Vector& agent, const Vector& goal, const Vector& obstacle, double obstacle_radius) {
  if (agent.size() != 2 || goal.size() != 2 || obstacle.size() != 2)
    throw std::invalid_argument("SeekerEnv::set_scene: positions must be 2D");
  if (!(obstacle_radius > 0.0)) throw std::invalid_argument("SeekerEnv::set_scene: obstacle radius must be positive");
  agent_ = agent;
  goal_ = goal;
  obstacle_ = obstacle;
  obstacle_radius_ = obstacle_radius;
  steps_ = 0;
}

Vector SeekerEnv::reset(Rng& rng) {
  std::uniform_real_distribution<double> pos(-config_.bound, config_.bound);
  std::uniform_real_distribution<double> rad(config_.min_obstacle_radius, config_.max_obstacle_radius);
  for (;;) {
    const Vector agent{{pos(rng), pos(rng)}};
    const Vector goal{{pos(rng), pos(rng)}};
    const Vector obstacle{{pos(rng), pos(rng)}};
    const double r = rad(rng);
    if ((agent - obstacle).norm() <= r || (goal - obstacle).norm() <= r) continue;
    if ((agent - goal).norm() <= config_.goal_radius) continue;
    if (segment_distance(obstacle, agent, goal) >= r) continue;
    set_scene(agent, goal, obstacle, r);
    return observation();
  }
}

bool SeekerEnv::in_collision(const Vector& position) const {
  return (position - obstacle_).norm() < obstacle_radius_ || position.cwiseAbs().maxCoeff() > config_.bound;
}

double SeekerEnv::reward(const Vector& next) const {
  if (in_collision(next)) return -100.0;
  if ((next - goal_).norm() <= config_.goal_radius) return 100.0;
  return -1.0 - (goal_ - next).norm();
}

StepResult SeekerEnv::step(const Vector& action, Rng&) {
  if (action.size() != 2 || !action.allFinite()) throw std::invalid_argument("SeekerEnv::step: bad action");
  if (!action_box_.contains(action, kActionSlack)) throw std::invalid_argument("SeekerEnv::step: action outside [-1, 1]²");
  const Vector next = agent_ + config_.dt * action;
  StepResult out;
  out.collision = in_collision(next);
  out.goal_reached = !out.collision && (next - goal_).norm() <= config_.goal_radius;
  out.reward = reward(next);
  agent_ = next;
  ++steps_;
  out.terminated = out.collision || out.goal_reached;
  out.truncated = !out.terminated && steps_ >= config_.horizon;
  out.observation = observation();
  return out;
}

Vector SeekerEnv::observation() const {
  Vector obs(7);
  obs << agent_, goal_ - agent_, obstacle_ - agent_, obstacle_radius_;
  return obs / 10.0;
}

}  // namespace maskrl
