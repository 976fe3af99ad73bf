#pragma once

#include <maskrl/envs/environment.hpp>
#include <maskrl/masking/masked_policy.hpp>
#include <maskrl/ppo/actor_critic.hpp>
#include <maskrl/relevant/providers.hpp>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace maskrl {

/// One update's worth of on-policy experience. Column t of `observations`
/// is the observation before step t; `dones[t]` marks that the episode
/// ended with step t.
struct RolloutBatch {
  Matrix observations;
  std::vector<MaskStep> steps;
  /// Executed actions in environment units.
  Matrix actions;
  Vector log_probs;
  /// Environment rewards; truncated episodes get γ·V(s_T) folded in.
  Vector rewards;
  Vector values;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> fallbacks;
  std::vector<std::uint8_t> collisions;
  /// Undiscounted return of the episode that ended at t, NaN elsewhere.
  Vector episode_returns;
  double last_value = 0.0;
  Vector advantages;
  Vector returns;

  Index size() const { return static_cast<Index>(steps.size()); }
};

/// δ_t = r_t + γ V_{t+1} (1 - done_t) - V_t,  A_t = Σ_k (γλ)^k δ_{t+k} cut at episode ends.
/// V_T is `last_value`. Returns are A + V.
void compute_gae(const Vector& rewards, const Vector& values, const std::vector<std::uint8_t>& dones, double last_value,
                 double gamma, double lambda, Vector& advantages, Vector& returns);
void compute_gae(RolloutBatch& batch, double gamma, double lambda);

struct RolloutTelemetry {
  long steps = 0;
  long episodes = 0;
  long clamped = 0;
  long replaced = 0;
  long underflows = 0;
  long fallbacks = 0;
  long uncertified = 0;
  long collisions = 0;
  long goals = 0;
  /// Executed actions that failed the A^r membership test (should stay 0).
  long membership_violations = 0;
  std::vector<double> episode_returns;
};

/// Raised when no relevant set can be produced for a visited state.
class RolloutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Steps one environment with a masked policy, carrying episodes across
/// calls to collect().
class RolloutCollector {
 public:
  /// `provider` may be null for the unmasked policy.
  RolloutCollector(std::unique_ptr<Environment> env, std::unique_ptr<RelevantSetProvider> provider, MaskedPolicy mask,
                   std::uint64_t seed);

  RolloutBatch collect(const ActorCritic& model, Index n_steps, double gamma);

  const RolloutTelemetry& telemetry() const { return telemetry_; }
  const Environment& environment() const { return *env_; }
  const MaskedPolicy& mask() const { return mask_; }
  const ActionNormalizer& normalizer() const { return normalizer_; }

 private:
  std::unique_ptr<Environment> env_;
  std::unique_ptr<RelevantSetProvider> provider_;
  MaskedPolicy mask_;
  ActionNormalizer normalizer_;
  Rng env_rng_;
  Rng policy_rng_;
  Vector observation_;
  double episode_return_ = 0.0;
  RolloutTelemetry telemetry_;
};

/// A^r for the current state in normalized action coordinates, plus whether a
/// fallback fired. Throws RolloutError on hard failure.
struct MaskedSet {
  Zonotope set;
  bool fallback = false;
  bool certified = true;
};
MaskedSet masked_relevant_set(const Environment& env, RelevantSetProvider* provider, const ActionNormalizer& normalizer);

struct EvaluationResult {
  double mean_return = 0.0;
  double std_return = 0.0;
  std::vector<double> returns;
  long collisions = 0;
  long goals = 0;
  long fallbacks = 0;
};

/// Runs whole episodes; deterministic mode executes the mask-mapped mean.
EvaluationResult evaluate_policy(const ActorCritic& model, const MaskedPolicy& mask, const Environment& env,
                                 const RelevantSetProvider* provider, int episodes, bool deterministic,
                                 std::uint64_t seed);

/// Independent random streams derived from one run seed.
Rng stream_rng(std::uint64_t seed, std::uint32_t stream);
inline Rng environment_rng(std::uint64_t seed) { return stream_rng(seed, 1); }
inline Rng policy_rng(std::uint64_t seed) { return stream_rng(seed, 2); }

}  // namespace maskrl
