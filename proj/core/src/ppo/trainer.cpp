#include <maskrl/ppo/trainer.hpp>

#include <maskrl/envs/quadrotor.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

namespace maskrl {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(total_steps > 0, "total_steps must be positive");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate must be >= 0");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
  require(n_steps > 0, "n_steps must be positive");
  require(n_epochs > 0, "n_epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(max_grad_norm > 0.0, "max_grad_norm must be positive");
  require(ent_coef >= 0.0, "ent_coef must be >= 0");
  require(vf_coef >= 0.0, "vf_coef must be >= 0");
  require(clip_range > 0.0 && clip_range < 1.0, "clip_range must be in (0, 1)");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae_lambda must be in [0, 1]");
  require(hidden_layers >= 0, "hidden_layers must be >= 0");
  require(neurons > 0, "neurons must be positive");
  require(log_every > 0, "log_every must be positive");
  require(eval_episodes > 0, "eval_episodes must be positive");
  require(eps_lin >= 0.0, "eps_lin must be >= 0");
  require(relevant_state_scale > 0.0 && relevant_state_scale <= 1.0, "relevant_state_scale must be in (0, 1]");
  require(cubature_rel_tol > 0.0, "cubature_rel_tol must be positive");
}

namespace {

struct Column {
  double lr;
  double gamma;
  Index n_steps;
  Index epochs;
  Index batch;
  double ent;
  double log_std;
  double lambda;
  Index neurons;
};

// Columns: baseline, ray, generator, distributional, replacement.
int column_of(MaskKind mask) {
  switch (mask) {
    case MaskKind::none: return 0;
    case MaskKind::ray: return 1;
    case MaskKind::generator: return 2;
    case MaskKind::distributional: return 3;
    case MaskKind::replacement: return 4;
  }
  return 0;
}

}  // namespace

TrainConfig default_config(EnvKind env, MaskKind mask) {
  static const Column seeker[5] = {
      {5.43e-5, 0.98, 32, 4, 8, 4.71e-5, -1.183, 0.9, 32},
      {8.25e-4, 0.98, 256, 8, 128, 1.66e-7, -0.010, 0.9, 32},
      // printed as 2084 steps per update; kept as printed
      {3.45e-4, 0.98, 2084, 16, 256, 6.61e-7, -0.255, 0.9, 32},
      {3.85e-5, 0.98, 32, 4, 8, 3.33e-6, -1.213, 0.9, 32},
      {1.92e-6, 0.98, 128, 4, 128, 1.83e-7, -1.064, 0.9, 32},
  };
  static const Column quad2d[5] = {
      {1.24e-4, 0.99, 256, 32, 64, 8.9e-2, -0.437, 0.95, 256},
      {7.92e-4, 0.99, 1024, 8, 128, 5.65e-2, -0.784, 0.95, 256},
      {4.34e-3, 0.99, 1024, 8, 128, 5.08e-2, -1.251, 0.95, 256},
      {3.94e-4, 0.99, 1024, 8, 128, 5.99e-3, -1.217, 0.95, 256},
      {1.13e-4, 0.99, 512, 8, 128, 5.42e-3, -1.019, 0.95, 256},
  };
  static const Column quad3d[5] = {
      {2.38e-4, 0.98, 32, 8, 16, 5.85e-5, -3.609, 0.9, 32},
      {1.08e-3, 0.98, 128, 4, 32, 1.14e-7, -1.793, 0.9, 32},
      {9.24e-5, 0.98, 128, 16, 16, 3.41e-7, -1.363, 0.9, 32},
      {7.88e-4, 0.98, 64, 4, 64, 2.75e-6, -1.880, 0.9, 32},
      {6.25e-4, 0.98, 128, 4, 64, 1.88e-6, -1.582, 0.9, 32},
  };
  const Column* table = env == EnvKind::seeker ? seeker : env == EnvKind::quad2d ? quad2d : quad3d;
  const Column& col = table[column_of(mask)];
  TrainConfig c;
  c.env = env;
  c.mask = mask;
  c.learning_rate = col.lr;
  c.gamma = col.gamma;
  c.n_steps = col.n_steps;
  c.n_epochs = col.epochs;
  c.batch_size = col.batch;
  c.max_grad_norm = 0.9;
  c.ent_coef = col.ent;
  c.log_std_init = col.log_std;
  c.vf_coef = 0.5;
  c.clip_range = 0.1;
  c.gae_lambda = col.lambda;
  c.activation = Activation::relu;
  c.hidden_layers = 2;
  c.neurons = col.neurons;
  return c;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"env", to_string(c.env)},
                     {"mask", to_string(c.mask)},
                     {"seed", c.seed},
                     {"total_steps", c.total_steps},
                     {"learning_rate", c.learning_rate},
                     {"gamma", c.gamma},
                     {"n_steps", c.n_steps},
                     {"n_epochs", c.n_epochs},
                     {"batch_size", c.batch_size},
                     {"max_grad_norm", c.max_grad_norm},
                     {"ent_coef", c.ent_coef},
                     {"log_std_init", c.log_std_init},
                     {"vf_coef", c.vf_coef},
                     {"clip_range", c.clip_range},
                     {"gae_lambda", c.gae_lambda},
                     {"activation", to_string(c.activation)},
                     {"hidden_layers", c.hidden_layers},
                     {"neurons", c.neurons},
                     {"log_every", c.log_every},
                     {"eval_episodes", c.eval_episodes},
                     {"full_action_set", c.full_action_set},
                     {"eps_lin", c.eps_lin},
                     {"relevant_state_scale", c.relevant_state_scale},
                     {"cubature_rel_tol", c.cubature_rel_tol}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.env = parse_env_kind(j.at("env").get<std::string>());
  c.mask = parse_mask_kind(j.at("mask").get<std::string>());
  j.at("seed").get_to(c.seed);
  j.at("total_steps").get_to(c.total_steps);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("gamma").get_to(c.gamma);
  j.at("n_steps").get_to(c.n_steps);
  j.at("n_epochs").get_to(c.n_epochs);
  j.at("batch_size").get_to(c.batch_size);
  j.at("max_grad_norm").get_to(c.max_grad_norm);
  j.at("ent_coef").get_to(c.ent_coef);
  j.at("log_std_init").get_to(c.log_std_init);
  j.at("vf_coef").get_to(c.vf_coef);
  j.at("clip_range").get_to(c.clip_range);
  j.at("gae_lambda").get_to(c.gae_lambda);
  c.activation = parse_activation(j.at("activation").get<std::string>());
  j.at("hidden_layers").get_to(c.hidden_layers);
  j.at("neurons").get_to(c.neurons);
  j.at("log_every").get_to(c.log_every);
  j.at("eval_episodes").get_to(c.eval_episodes);
  j.at("full_action_set").get_to(c.full_action_set);
  j.at("eps_lin").get_to(c.eps_lin);
  j.at("relevant_state_scale").get_to(c.relevant_state_scale);
  j.at("cubature_rel_tol").get_to(c.cubature_rel_tol);
}

std::string config_hash(const TrainConfig& config) {
  const std::string text = nlohmann::json(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LossTerms ppo_loss(const ActorCritic& model, const MaskedPolicy& mask, const RolloutBatch& batch,
                   const std::vector<Index>& indices, const TrainConfig& config, Vector* grad) {
  const Index n = static_cast<Index>(indices.size());
  if (n == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  const Index pd = model.shape().policy_dim;
  Matrix obs(batch.observations.rows(), n);
  Vector adv(n);
  Vector ret(n);
  for (Index i = 0; i < n; ++i) {
    const Index k = indices[static_cast<size_t>(i)];
    obs.col(i) = batch.observations.col(k);
    adv(i) = batch.advantages(k);
    ret(i) = batch.returns(k);
  }
  if (n > 1) {
    const double mean = adv.mean();
    const double sd = std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(n - 1));
    adv = ((adv.array() - mean) / (sd + 1e-8)).matrix();
  }

  Mlp::Cache pcache;
  Mlp::Cache vcache;
  const Matrix means = model.policy_means(obs, grad ? &pcache : nullptr);
  const Vector values = model.values(obs, grad ? &vcache : nullptr);
  const Vector log_std = model.log_std();

  LossTerms out;
  Matrix grad_means = Matrix::Zero(pd, n);
  Vector grad_log_std = Vector::Zero(pd);
  const double lo = 1.0 - config.clip_range;
  const double hi = 1.0 + config.clip_range;
  for (Index i = 0; i < n; ++i) {
    const Index k = indices[static_cast<size_t>(i)];
    const DiagGaussian dist{means.col(i), log_std};
    const MaskEvaluation ev = mask.evaluate(dist, batch.steps[static_cast<size_t>(k)]);
    const double log_ratio = ev.log_prob - batch.log_probs(k);
    const double ratio = std::exp(log_ratio);
    const double clipped = std::clamp(ratio, lo, hi);
    const double unclipped_term = ratio * adv(i);
    const double clipped_term = clipped * adv(i);
    out.policy -= std::min(unclipped_term, clipped_term) / static_cast<double>(n);
    if (ratio < lo || ratio > hi) out.clip_fraction += 1.0 / static_cast<double>(n);
    out.approx_kl += ((ratio - 1.0) - log_ratio) / static_cast<double>(n);
    if (grad && unclipped_term <= clipped_term) {
      // d/dlogπ of -r·A/n; the clipped branch is flat in θ
      const double coef = -adv(i) * ratio / static_cast<double>(n);
      grad_means.col(i) = coef * ev.grad.mean;
      grad_log_std += coef * ev.grad.log_std;
    }
  }
  const double log_2pi_e = std::log(2.0 * std::numbers::pi) + 1.0;
  const double entropy = log_std.sum() + 0.5 * static_cast<double>(pd) * log_2pi_e;
  out.entropy = -entropy;
  out.value = (values - ret).squaredNorm() / static_cast<double>(n);
  out.total = out.policy + config.ent_coef * out.entropy + config.vf_coef * out.value;

  if (grad) {
    if (grad->size() != model.num_params()) grad->setZero(model.num_params());
    grad_log_std.array() -= config.ent_coef;
    double* g = grad->data();
    model.policy_net().backward(model.params().data(), pcache, grad_means, g);
    grad->segment(model.log_std_offset(), pd) += grad_log_std;
    const Matrix grad_values = (config.vf_coef * 2.0 / static_cast<double>(n)) * (values - ret).transpose();
    model.value_net().backward(model.params().data() + model.value_offset(), vcache, grad_values,
                               g + model.value_offset());
  }
  return out;
}

UpdateStats ppo_update(ActorCritic& model, Adam& optimizer, const MaskedPolicy& mask, const RolloutBatch& batch,
                       const TrainConfig& config, Rng& shuffle_rng) {
  const Index size = batch.size();
  std::vector<Index> order(static_cast<size_t>(size));
  UpdateStats stats;
  Vector grad(model.num_params());
  for (Index epoch = 0; epoch < config.n_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (Index start = 0; start < size; start += config.batch_size) {
      const Index end = std::min(size, start + config.batch_size);
      const std::vector<Index> indices(order.begin() + start, order.begin() + end);
      grad.setZero();
      const LossTerms loss = ppo_loss(model, mask, batch, indices, config, &grad);
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite loss (policy " << loss.policy << ", value " << loss.value << ", entropy " << loss.entropy
            << ") at epoch " << epoch << ", minibatch start " << start << "; batch: size " << size
            << ", |adv|max " << batch.advantages.cwiseAbs().maxCoeff() << ", log_prob range ["
            << batch.log_probs.minCoeff() << ", " << batch.log_probs.maxCoeff() << "]";
        throw UpdateError(msg.str());
      }
      stats.grad_norm = clip_grad_norm(grad, config.max_grad_norm);
      optimizer.step(model.params(), grad);
      stats.policy_loss += loss.policy;
      stats.value_loss += loss.value;
      stats.entropy_loss += loss.entropy;
      stats.clip_fraction += loss.clip_fraction;
      stats.approx_kl += loss.approx_kl;
      ++stats.minibatches;
    }
  }
  const double m = stats.minibatches;
  stats.policy_loss /= m;
  stats.value_loss /= m;
  stats.entropy_loss /= m;
  stats.clip_fraction /= m;
  stats.approx_kl /= m;
  return stats;
}

std::string metrics_csv_line(const MetricRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", row.step, row.episode_return_mean,
                row.episode_return_std, row.clamp_rate, row.fallback_rate, row.policy_loss, row.value_loss,
                row.entropy_loss);
  return buf;
}

std::unique_ptr<Environment> make_training_environment(const TrainConfig& config) {
  return make_environment(config.env);
}

std::unique_ptr<RelevantSetProvider> make_training_provider(const TrainConfig& config, const Environment& env) {
  if (config.full_action_set) return make_full_action_provider(env);
  if (config.mask == MaskKind::none) return nullptr;
  TemplateProviderConfig tc;
  tc.eps_lin = config.eps_lin;
  tc.relevant_state_scale = config.relevant_state_scale;
  return make_provider(config.env, tc);
}

MaskedPolicy make_masked_policy(const TrainConfig& config, const Environment& env) {
  Index generators = env.action_dim();
  if (!config.full_action_set) {
    switch (config.env) {
      case EnvKind::seeker: generators = seeker_template().cols(); break;
      case EnvKind::quad2d: generators = quad2d_template().cols(); break;
      case EnvKind::quad3d: generators = quad3d_template().cols(); break;
    }
  }
  MaskedPolicy mask(config.mask, env.action_dim(), generators);
  CubatureOptions cub;
  cub.rel_tol = config.cubature_rel_tol;
  mask.set_cubature_options(cub);
  return mask;
}

NetworkShape network_shape(const TrainConfig& config, const Environment& env, const MaskedPolicy& mask) {
  NetworkShape shape;
  shape.observation_dim = env.observation_dim();
  shape.policy_dim = mask.policy_dim();
  shape.hidden_layers = config.hidden_layers;
  shape.neurons = config.neurons;
  shape.activation = config.activation;
  return shape;
}

Trainer::Trainer(TrainConfig config) : config_(std::move(config)) {
  config_.validate();
  auto env = make_training_environment(config_);
  auto provider = make_training_provider(config_, *env);
  MaskedPolicy mask = make_masked_policy(config_, *env);
  model_ = ActorCritic(network_shape(config_, *env, mask));
  Rng init_rng = stream_rng(config_.seed, 3);
  model_.initialize(init_rng, config_.log_std_init);
  AdamOptions adam;
  adam.learning_rate = config_.learning_rate;
  optimizer_ = Adam(model_.num_params(), adam);
  shuffle_rng_ = stream_rng(config_.seed, 4);
  collector_ = std::make_unique<RolloutCollector>(std::move(env), std::move(provider), std::move(mask), config_.seed);
}

TrainResult Trainer::run(const std::function<void(const MetricRow&)>& on_row) {
  TrainResult result;
  long step = 0;
  long window_steps = 0;
  long window_clamped = 0;
  long window_fallbacks = 0;
  std::vector<double> window_returns;
  MetricRow previous;
  previous.episode_return_mean = std::numeric_limits<double>::quiet_NaN();
  previous.episode_return_std = std::numeric_limits<double>::quiet_NaN();

  while (step < config_.total_steps) {
    RolloutBatch batch = collector_->collect(model_, config_.n_steps, config_.gamma);
    compute_gae(batch, config_.gamma, config_.gae_lambda);
    result.last_update = ppo_update(model_, optimizer_, collector_->mask(), batch, config_, shuffle_rng_);
    ++result.updates;

    for (Index t = 0; t < batch.size(); ++t) {
      ++step;
      ++window_steps;
      window_clamped += batch.steps[static_cast<size_t>(t)].clamped;
      window_fallbacks += batch.fallbacks[static_cast<size_t>(t)];
      if (std::isfinite(batch.episode_returns(t))) window_returns.push_back(batch.episode_returns(t));
      if (step % config_.log_every != 0 || step > config_.total_steps) continue;

      MetricRow row;
      row.step = step;
      if (window_returns.empty()) {
        row.episode_return_mean = previous.episode_return_mean;
        row.episode_return_std = previous.episode_return_std;
      } else {
        const double count = static_cast<double>(window_returns.size());
        double mean = 0.0;
        for (double r : window_returns) mean += r;
        mean /= count;
        double var = 0.0;
        for (double r : window_returns) var += (r - mean) * (r - mean);
        row.episode_return_mean = mean;
        row.episode_return_std = std::sqrt(var / count);
      }
      row.clamp_rate = static_cast<double>(window_clamped) / static_cast<double>(window_steps);
      row.fallback_rate = static_cast<double>(window_fallbacks) / static_cast<double>(window_steps);
      row.policy_loss = result.last_update.policy_loss;
      row.value_loss = result.last_update.value_loss;
      row.entropy_loss = result.last_update.entropy_loss;
      result.metrics.push_back(row);
      if (on_row) on_row(row);
      previous = row;
      window_steps = window_clamped = window_fallbacks = 0;
      window_returns.clear();
    }
  }
  result.steps = step;
  result.telemetry = collector_->telemetry();
  return result;
}

}  // namespace maskrl
