#pragma once

#include <maskrl/ppo/rollout.hpp>

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>

namespace maskrl {

struct TrainConfig {
  EnvKind env = EnvKind::seeker;
  MaskKind mask = MaskKind::none;
  std::uint64_t seed = 0;
  long total_steps = 100000;

  double learning_rate = 3e-4;
  double gamma = 0.99;
  Index n_steps = 2048;
  Index n_epochs = 10;
  Index batch_size = 64;
  double max_grad_norm = 0.5;
  double ent_coef = 0.0;
  double log_std_init = 0.0;
  double vf_coef = 0.5;
  double clip_range = 0.2;
  double gae_lambda = 0.95;
  Activation activation = Activation::relu;
  Index hidden_layers = 2;
  Index neurons = 64;

  long log_every = 2048;
  int eval_episodes = 10;
  /// Use A^r = A at every state (identity masking).
  bool full_action_set = false;
  double eps_lin = 1e-3;
  double relevant_state_scale = 0.9;
  double cubature_rel_tol = 1e-3;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Tuned PPO settings for an environment and mask (baseline for `none`).
TrainConfig default_config(EnvKind env, MaskKind mask);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const TrainConfig& config);

struct LossTerms {
  double policy = 0.0;
  double value = 0.0;
  /// Negative entropy of the base Gaussian.
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

/// Clipped-surrogate loss on the minibatch `indices` with advantages
/// normalized over the minibatch; adds ∂loss/∂params to `grad` if given.
/// Scores come from the mask, so the distributional mask's integral enters
/// the ratio but not the gradient.
LossTerms ppo_loss(const ActorCritic& model, const MaskedPolicy& mask, const RolloutBatch& batch,
                   const std::vector<Index>& indices, const TrainConfig& config, Vector* grad = nullptr);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;
  int minibatches = 0;
};

class UpdateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n_epochs passes of shuffled minibatches; losses are averaged over all of them.
UpdateStats ppo_update(ActorCritic& model, Adam& optimizer, const MaskedPolicy& mask, const RolloutBatch& batch,
                       const TrainConfig& config, Rng& shuffle_rng);

struct MetricRow {
  long step = 0;
  double episode_return_mean = 0.0;
  double episode_return_std = 0.0;
  double clamp_rate = 0.0;
  double fallback_rate = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy_loss = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "step,episode_return_mean,episode_return_std,clamp_rate,fallback_rate,policy_loss,value_loss,entropy_loss";
std::string metrics_csv_line(const MetricRow& row);

/// Environment, provider and masked policy for a config.
std::unique_ptr<Environment> make_training_environment(const TrainConfig& config);
std::unique_ptr<RelevantSetProvider> make_training_provider(const TrainConfig& config, const Environment& env);
MaskedPolicy make_masked_policy(const TrainConfig& config, const Environment& env);
NetworkShape network_shape(const TrainConfig& config, const Environment& env, const MaskedPolicy& mask);

struct TrainResult {
  std::vector<MetricRow> metrics;
  RolloutTelemetry telemetry;
  UpdateStats last_update;
  long steps = 0;
  int updates = 0;
};

class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  const TrainConfig& config() const { return config_; }
  const ActorCritic& model() const { return model_; }
  ActorCritic& model() { return model_; }
  const MaskedPolicy& mask() const { return collector_->mask(); }
  const Environment& environment() const { return collector_->environment(); }

  /// Trains for total_steps (rounded up to whole rollouts); `on_row` sees
  /// each metrics row as it is produced.
  TrainResult run(const std::function<void(const MetricRow&)>& on_row = {});

 private:
  TrainConfig config_;
  ActorCritic model_;
  Adam optimizer_;
  Rng shuffle_rng_;
  std::unique_ptr<RolloutCollector> collector_;
};

}  // namespace maskrl
