#pragma once

#include <maskrl/envs/environment.hpp>

namespace maskrl {

struct SeekerConfig {
  double dt = 1.0;
  double goal_radius = 0.3;
  int horizon = 100;
  double bound = 10.0;
  double min_obstacle_radius = 1.0;
  double max_obstacle_radius = 3.0;
};

/// Single integrator ṡ = a; no disturbance.
class SeekerDynamics final : public DynamicsModel {
 public:
  Index state_dim() const override { return 2; }
  Index action_dim() const override { return 2; }
  Index disturbance_dim() const override { return 0; }
  Vector derivative(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix state_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix action_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix disturbance_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
};

/// Reach a goal in [-10, 10]² without touching a disk obstacle that blocks
/// the straight path.
///
/// Observation (7): [s, s* - s, o - s, r_o] / 10.
class SeekerEnv final : public Environment {
 public:
  explicit SeekerEnv(SeekerConfig config = {});

  EnvKind kind() const override { return EnvKind::seeker; }
  const DynamicsModel& dynamics() const override { return dynamics_; }
  const IntervalBox& action_box() const override { return action_box_; }
  const IntervalBox& state_box() const override { return state_box_; }
  Index observation_dim() const override { return 7; }
  double dt() const override { return config_.dt; }
  int horizon() const override { return config_.horizon; }

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;

  Vector observation() const override;
  const Vector& state() const override { return agent_; }
  int steps_taken() const override { return steps_; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<SeekerEnv>(*this); }

  /// Places the scene directly; used by tests and the CLI.
  void set_scene(const Vector& agent, const Vector& goal, const Vector& obstacle, double obstacle_radius);

  const Vector& goal() const { return goal_; }
  const Vector& obstacle() const { return obstacle_; }
  double obstacle_radius() const { return obstacle_radius_; }
  const SeekerConfig& config() const { return config_; }

  bool in_collision(const Vector& position) const;
  /// Step reward for arriving at `next`.
  double reward(const Vector& next) const;

 private:
  SeekerConfig config_;
  SeekerDynamics dynamics_;
  IntervalBox action_box_;
  IntervalBox state_box_;
  Vector agent_ = Vector::Zero(2);
  Vector goal_ = Vector::Zero(2);
  Vector obstacle_ = Vector::Constant(2, 100.0);
  double obstacle_radius_ = 1.0;
  int steps_ = 0;
};

/// Distance from p to the segment [a, b].
double segment_distance(const Vector& p, const Vector& a, const Vector& b);

}  // namespace maskrl
