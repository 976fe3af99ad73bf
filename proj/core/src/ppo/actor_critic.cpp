#include <maskrl/ppo/actor_critic.hpp>

#include <cmath>
#include <stdexcept>

namespace maskrl {

namespace {

std::vector<Index> layer_sizes(Index in, Index out, const NetworkShape& shape) {
  std::vector<Index> sizes{in};
  for (Index i = 0; i < shape.hidden_layers; ++i) sizes.push_back(shape.neurons);
  sizes.push_back(out);
  return sizes;
}

}  // namespace

ActorCritic::ActorCritic(NetworkShape shape) : shape_(shape) {
  if (shape.observation_dim < 1 || shape.policy_dim < 1) throw std::invalid_argument("ActorCritic: empty dimensions");
  if (shape.hidden_layers < 0 || shape.neurons < 1) throw std::invalid_argument("ActorCritic: bad hidden layout");
  policy_ = Mlp(layer_sizes(shape.observation_dim, shape.policy_dim, shape), shape.activation);
  value_ = Mlp(layer_sizes(shape.observation_dim, 1, shape), shape.activation);
  params_ = Vector::Zero(policy_.num_params() + shape.policy_dim + value_.num_params());
}

void ActorCritic::initialize(Rng& rng, double log_std_init) {
  const double hidden_gain = std::sqrt(2.0);
  policy_.initialize(params_.data(), rng, hidden_gain, 0.01);
  params_.segment(log_std_offset(), shape_.policy_dim).setConstant(log_std_init);
  value_.initialize(params_.data() + value_offset(), rng, hidden_gain, 1.0);
}

Matrix ActorCritic::policy_means(const Matrix& observations, Mlp::Cache* cache) const {
  return policy_.forward(params_.data(), observations, cache);
}

Vector ActorCritic::values(const Matrix& observations, Mlp::Cache* cache) const {
  return value_.forward(params_.data() + value_offset(), observations, cache).row(0).transpose();
}

DiagGaussian ActorCritic::distribution(const Vector& observation) const {
  return DiagGaussian{policy_means(observation).col(0), log_std()};
}

double ActorCritic::value(const Vector& observation) const { return values(observation)(0); }

Adam::Adam(Index num_params, AdamOptions options)
    : options_(options), m_(Vector::Zero(num_params)), v_(Vector::Zero(num_params)) {}

void Adam::step(Vector& params, const Vector& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) throw std::invalid_argument("Adam: size mismatch");
  ++steps_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  m_ = b1 * m_ + (1.0 - b1) * grad;
  v_ = b2 * v_ + (1.0 - b2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double step = options_.learning_rate / c1;
  // eps is added to the bias-corrected second moment's root
  params.array() -= step * m_.array() / ((v_.array() / c2).sqrt() + options_.epsilon);
}

double clip_grad_norm(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / (norm + 1e-6);
  return norm;
}

}  // namespace maskrl
