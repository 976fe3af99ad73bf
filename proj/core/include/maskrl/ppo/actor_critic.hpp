#pragma once

#include <maskrl/masking/gaussian.hpp>
#include <maskrl/ppo/mlp.hpp>

namespace maskrl {

struct NetworkShape {
  Index observation_dim = 0;
  Index policy_dim = 0;
  Index hidden_layers = 2;
  Index neurons = 32;
  Activation activation = Activation::relu;
};

/// Separate policy and value MLPs plus a state-independent log-std vector.
/// Parameter layout: [policy net | log_std | value net].
class ActorCritic {
 public:
  ActorCritic() = default;
  explicit ActorCritic(NetworkShape shape);

  /// Orthogonal init (gain √2 hidden, 0.01 policy head, 1 value head).
  void initialize(Rng& rng, double log_std_init);

  const NetworkShape& shape() const { return shape_; }
  Index num_params() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Index log_std_offset() const { return policy_.num_params(); }
  Index value_offset() const { return policy_.num_params() + shape_.policy_dim; }
  Vector log_std() const { return params_.segment(log_std_offset(), shape_.policy_dim); }

  const Mlp& policy_net() const { return policy_; }
  const Mlp& value_net() const { return value_; }

  DiagGaussian distribution(const Vector& observation) const;
  double value(const Vector& observation) const;

  /// Batched heads; observations are columns.
  Matrix policy_means(const Matrix& observations, Mlp::Cache* cache = nullptr) const;
  Vector values(const Matrix& observations, Mlp::Cache* cache = nullptr) const;

 private:
  NetworkShape shape_;
  Mlp policy_;
  Mlp value_;
  Vector params_;
};

struct AdamOptions {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-5;
};

class Adam {
 public:
  Adam() = default;
  Adam(Index num_params, AdamOptions options);

  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  const AdamOptions& options() const { return options_; }
  long steps() const { return steps_; }

  void step(Vector& params, const Vector& grad);

 private:
  AdamOptions options_;
  Vector m_;
  Vector v_;
  long steps_ = 0;
};

/// Rescales `grad` in place so its Euclidean norm is at most `max_norm`;
/// returns the norm before clipping.
double clip_grad_norm(Vector& grad, double max_norm);

}  // namespace maskrl
