#pragma once

#include <maskrl/geometry/zonotope.hpp>

#include <memory>
#include <string>

namespace maskrl {

enum class EnvKind { seeker, quad2d, quad3d };

const char* to_string(EnvKind kind);
EnvKind parse_env_kind(const std::string& name);

/// Continuous-time model ṡ = f(s, a, w) with analytic Jacobians.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual Index state_dim() const = 0;
  virtual Index action_dim() const = 0;
  virtual Index disturbance_dim() const = 0;
  virtual Vector derivative(const Vector& s, const Vector& a, const Vector& w) const = 0;
  virtual Matrix state_jacobian(const Vector& s, const Vector& a, const Vector& w) const = 0;
  virtual Matrix action_jacobian(const Vector& s, const Vector& a, const Vector& w) const = 0;
  virtual Matrix disturbance_jacobian(const Vector& s, const Vector& a, const Vector& w) const = 0;
};

/// One classical Runge-Kutta step with a and w held constant.
Vector rk4_step(const DynamicsModel& model, const Vector& s, const Vector& a, const Vector& w, double dt);

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  bool goal_reached = false;
  bool collision = false;

  bool done() const { return terminated || truncated; }
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvKind kind() const = 0;
  virtual const DynamicsModel& dynamics() const = 0;
  virtual const IntervalBox& action_box() const = 0;
  virtual const IntervalBox& state_box() const = 0;
  virtual Index observation_dim() const = 0;
  virtual double dt() const = 0;
  virtual int horizon() const = 0;

  virtual Vector reset(Rng& rng) = 0;
  /// Throws std::invalid_argument for actions outside the action box.
  virtual StepResult step(const Vector& action, Rng& rng) = 0;

  virtual Vector observation() const = 0;
  virtual const Vector& state() const = 0;
  virtual int steps_taken() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  Index state_dim() const { return dynamics().state_dim(); }
  Index action_dim() const { return dynamics().action_dim(); }
};

/// Actions may exceed the box by this much before step() rejects them.
inline constexpr double kActionSlack = 1e-6;

}  // namespace maskrl
