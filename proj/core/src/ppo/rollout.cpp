#include <maskrl/ppo/rollout.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace maskrl {

namespace {

std::string state_dump(const Environment& env) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(env.kind()) << " step " << env.steps_taken() << " state [";
  for (Index i = 0; i < env.state().size(); ++i) out << (i ? ", " : "") << env.state()(i);
  out << "]";
  return out.str();
}

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

void compute_gae(const Vector& rewards, const Vector& values, const std::vector<std::uint8_t>& dones, double last_value,
                 double gamma, double lambda, Vector& advantages, Vector& returns) {
  const Index n = rewards.size();
  if (values.size() != n || static_cast<Index>(dones.size()) != n)
    throw std::invalid_argument("compute_gae: rewards, values and dones must align");
  advantages.resize(n);
  double running = 0.0;
  for (Index t = n - 1; t >= 0; --t) {
    const double live = dones[static_cast<size_t>(t)] ? 0.0 : 1.0;
    const double next_value = t + 1 < n ? values(t + 1) : last_value;
    const double delta = rewards(t) + gamma * next_value * live - values(t);
    running = delta + gamma * lambda * live * running;
    advantages(t) = running;
  }
  returns = advantages + values;
}

void compute_gae(RolloutBatch& batch, double gamma, double lambda) {
  compute_gae(batch.rewards, batch.values, batch.dones, batch.last_value, gamma, lambda, batch.advantages,
              batch.returns);
}

MaskedSet masked_relevant_set(const Environment& env, RelevantSetProvider* provider, const ActionNormalizer& normalizer) {
  MaskedSet out;
  if (!provider) {
    out.set = Zonotope::from_box(normalizer.unit_box());
    return out;
  }
  RelevantSetResult result;
  try {
    result = provider->compute(env);
  } catch (const std::exception& e) {
    throw RolloutError(std::string("relevant set failed at ") + state_dump(env) + ": " + e.what());
  }
  out.set = normalizer.to_normalized(result.set);
  out.fallback = result.fallback;
  out.certified = result.certified;
  return out;
}

RolloutCollector::RolloutCollector(std::unique_ptr<Environment> env, std::unique_ptr<RelevantSetProvider> provider,
                                   MaskedPolicy mask, std::uint64_t seed)
    : env_(std::move(env)),
      provider_(std::move(provider)),
      mask_(std::move(mask)),
      normalizer_(env_->action_box()),
      env_rng_(environment_rng(seed)),
      policy_rng_(policy_rng(seed)) {
  if (mask_.action_dim() != env_->action_dim()) throw std::invalid_argument("RolloutCollector: action dimension mismatch");
  if (!provider_ && mask_.kind() != MaskKind::none)
    throw std::invalid_argument("RolloutCollector: masked policies need a relevant-set provider");
  observation_ = env_->reset(env_rng_);
  if (provider_) provider_->reset();
}

RolloutBatch RolloutCollector::collect(const ActorCritic& model, Index n_steps, double gamma) {
  RolloutBatch batch;
  const Index obs_dim = env_->observation_dim();
  batch.observations.resize(obs_dim, n_steps);
  batch.actions.resize(env_->action_dim(), n_steps);
  batch.log_probs.resize(n_steps);
  batch.rewards.resize(n_steps);
  batch.values.resize(n_steps);
  batch.dones.assign(static_cast<size_t>(n_steps), 0);
  batch.fallbacks.assign(static_cast<size_t>(n_steps), 0);
  batch.collisions.assign(static_cast<size_t>(n_steps), 0);
  batch.episode_returns = Vector::Constant(n_steps, std::numeric_limits<double>::quiet_NaN());
  batch.steps.reserve(static_cast<size_t>(n_steps));

  for (Index t = 0; t < n_steps; ++t) {
    const MaskedSet relevant = masked_relevant_set(*env_, provider_.get(), normalizer_);
    const DiagGaussian dist = model.distribution(observation_);
    MaskStep step = mask_.act(dist, relevant.set, policy_rng_);
    if (mask_.kind() != MaskKind::none && !contains_point(relevant.set, step.executed))
      ++telemetry_.membership_violations;
    const Vector action = normalizer_.to_env(step.executed);

    batch.observations.col(t) = observation_;
    batch.values(t) = model.value(observation_);
    batch.log_probs(t) = step.log_prob;
    batch.actions.col(t) = action;

    StepResult result = env_->step(action, env_rng_);
    double reward = result.reward;
    episode_return_ += result.reward;

    ++telemetry_.steps;
    telemetry_.clamped += step.clamped;
    telemetry_.replaced += step.replaced;
    telemetry_.underflows += step.underflow;
    telemetry_.fallbacks += relevant.fallback;
    telemetry_.uncertified += !relevant.certified;
    telemetry_.collisions += result.collision;
    telemetry_.goals += result.goal_reached;

    batch.fallbacks[static_cast<size_t>(t)] = relevant.fallback;
    batch.collisions[static_cast<size_t>(t)] = result.collision;
    if (result.truncated && !result.terminated) reward += gamma * model.value(result.observation);
    batch.rewards(t) = reward;
    batch.steps.push_back(std::move(step));

    if (result.done()) {
      batch.dones[static_cast<size_t>(t)] = 1;
      ++telemetry_.episodes;
      telemetry_.episode_returns.push_back(episode_return_);
      batch.episode_returns(t) = episode_return_;
      episode_return_ = 0.0;
      observation_ = env_->reset(env_rng_);
      if (provider_) provider_->reset();
    } else {
      observation_ = result.observation;
    }
  }
  batch.last_value = model.value(observation_);
  return batch;
}

EvaluationResult evaluate_policy(const ActorCritic& model, const MaskedPolicy& mask, const Environment& env,
                                 const RelevantSetProvider* provider, int episodes, bool deterministic,
                                 std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: need at least one episode");
  std::unique_ptr<Environment> local = env.clone();
  std::unique_ptr<RelevantSetProvider> local_provider = provider ? provider->clone() : nullptr;
  const ActionNormalizer normalizer(local->action_box());
  Rng env_rng = environment_rng(seed);
  Rng pol_rng = policy_rng(seed);

  EvaluationResult out;
  for (int e = 0; e < episodes; ++e) {
    Vector obs = local->reset(env_rng);
    if (local_provider) local_provider->reset();
    double total = 0.0;
    while (true) {
      const MaskedSet relevant = masked_relevant_set(*local, local_provider.get(), normalizer);
      out.fallbacks += relevant.fallback;
      const MaskStep step = mask.act(model.distribution(obs), relevant.set, pol_rng, deterministic);
      const StepResult result = local->step(normalizer.to_env(step.executed), env_rng);
      total += result.reward;
      out.collisions += result.collision;
      out.goals += result.goal_reached;
      if (result.done()) break;
      obs = result.observation;
    }
    out.returns.push_back(total);
  }
  double sum = 0.0;
  for (double r : out.returns) sum += r;
  out.mean_return = sum / episodes;
  double sq = 0.0;
  for (double r : out.returns) sq += (r - out.mean_return) * (r - out.mean_return);
  out.std_return = std::sqrt(sq / episodes);
  return out;
}

}  // namespace maskrl
