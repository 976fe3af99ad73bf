#pragma once

#include <maskrl/envs/environment.hpp>

namespace maskrl {

/// Planar quadrotor with two independent thrusts.
/// State [x, z, ẋ, ż, θ, θ̇], action [a₁, a₂], disturbance [w₁, w₂] on (ẍ, z̈).
class Quad2dDynamics final : public DynamicsModel {
 public:
  double g = 9.81;
  double k = 1.0;
  double d0 = 70.0;
  double d1 = 17.0;
  double n0 = 55.0;

  Index state_dim() const override { return 6; }
  Index action_dim() const override { return 2; }
  Index disturbance_dim() const override { return 2; }
  Vector derivative(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix state_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix action_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix disturbance_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
};

/// Linearized hover model, state [x, y, z, ẋ, ẏ, ż, θ, φ, ψ, θ̇, φ̇, ψ̇]:
///   ṡ = [ẋ, ẏ, ż, -9.81φ, 9.81θ, a₁, θ̇, φ̇, ψ̇, a₂, a₃, a₄]
class Quad3dDynamics final : public DynamicsModel {
 public:
  Index state_dim() const override { return 12; }
  Index action_dim() const override { return 4; }
  Index disturbance_dim() const override { return 0; }
  Vector derivative(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix state_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix action_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
  Matrix disturbance_jacobian(const Vector& s, const Vector& a, const Vector& w) const override;
};

struct QuadConfig {
  double dt = 0.1;
  /// RK4 steps per dt. A single step is off by ~1e-2 on the 2D attitude loop.
  int substeps = 10;
  int horizon = 200;
  /// Reset states are uniform in the state box shrunk by this factor about its center.
  double reset_scale = 0.9;
};

IntervalBox quad2d_action_box();
IntervalBox quad2d_state_box();
Zonotope quad2d_disturbance_set();
IntervalBox quad3d_action_box();
IntervalBox quad3d_state_box();

/// Stabilization to s* = 0 with reward
///   exp(-‖s'‖₂ - 0.005·‖(a - a_min) / a_range‖₁).
/// Observation is the raw state.
class QuadrotorEnv final : public Environment {
 public:
  QuadrotorEnv(EnvKind kind, QuadConfig config = {});

  EnvKind kind() const override { return kind_; }
  const DynamicsModel& dynamics() const override { return *model_; }
  const IntervalBox& action_box() const override { return action_box_; }
  const IntervalBox& state_box() const override { return state_box_; }
  Index observation_dim() const override { return model_->state_dim(); }
  double dt() const override { return config_.dt; }
  int horizon() const override { return config_.horizon; }

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action, Rng& rng) override;
  /// Step with a given disturbance instead of a sampled one.
  StepResult step_with_disturbance(const Vector& action, const Vector& w);

  Vector observation() const override { return state_; }
  const Vector& state() const override { return state_; }
  int steps_taken() const override { return steps_; }
  std::unique_ptr<Environment> clone() const override;

  void set_state(const Vector& s);
  const Zonotope& disturbance_set() const { return disturbance_; }
  const QuadConfig& config() const { return config_; }

  double reward(const Vector& next, const Vector& action) const;

 private:
  EnvKind kind_;
  QuadConfig config_;
  std::shared_ptr<const DynamicsModel> model_;
  IntervalBox action_box_;
  IntervalBox state_box_;
  Zonotope disturbance_;
  Vector state_;
  int steps_ = 0;
};

/// Environment factory for all kinds with default configuration.
std::unique_ptr<Environment> make_environment(EnvKind kind);

}  // namespace maskrl
