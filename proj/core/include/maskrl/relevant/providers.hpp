#pragma once

#include <maskrl/envs/environment.hpp>
#include <maskrl/relevant/relevant_sets.hpp>

#include <memory>
#include <optional>

namespace maskrl {

/// Computes A^r(s) for the current state of an environment. Providers keep
/// the last scalings for the infeasibility fallback, so each environment
/// instance needs its own provider.
class RelevantSetProvider {
 public:
  virtual ~RelevantSetProvider() = default;
  virtual RelevantSetResult compute(const Environment& env) = 0;
  /// Forget cached state at an episode boundary.
  virtual void reset() {}
  virtual std::unique_ptr<RelevantSetProvider> clone() const = 0;
};

class SeekerProvider final : public RelevantSetProvider {
 public:
  explicit SeekerProvider(Matrix template_generators = seeker_template(), double margin = 1e-8);
  RelevantSetResult compute(const Environment& env) override;
  void reset() override { previous_.reset(); }
  std::unique_ptr<RelevantSetProvider> clone() const override { return std::make_unique<SeekerProvider>(*this); }

 private:
  Matrix template_;
  double margin_;
  std::optional<Vector> previous_;
};

struct TemplateProviderConfig {
  /// S^r is the state box scaled about its center by this factor unless
  /// `relevant_states` is given.
  double relevant_state_scale = 0.9;
  std::optional<Zonotope> relevant_states;
  double eps_lin = 1e-3;
};

class TemplateProvider final : public RelevantSetProvider {
 public:
  TemplateProvider(EnvKind kind, TemplateProviderConfig config = {});
  RelevantSetResult compute(const Environment& env) override;
  void reset() override { previous_.reset(); }
  std::unique_ptr<RelevantSetProvider> clone() const override { return std::make_unique<TemplateProvider>(*this); }

  const Zonotope& relevant_states() const { return relevant_states_; }
  const Matrix& template_generators() const { return template_; }
  double eps_lin() const { return config_.eps_lin; }

 private:
  EnvKind kind_;
  TemplateProviderConfig config_;
  Matrix template_;
  Zonotope relevant_states_;
  std::optional<Vector> previous_;
};

/// The same set at every state.
class StaticProvider final : public RelevantSetProvider {
 public:
  explicit StaticProvider(Zonotope set) : set_(std::move(set)) {}
  RelevantSetResult compute(const Environment& env) override;
  std::unique_ptr<RelevantSetProvider> clone() const override { return std::make_unique<StaticProvider>(*this); }

 private:
  Zonotope set_;
};

/// Seeker or template provider matching the environment kind.
std::unique_ptr<RelevantSetProvider> make_provider(EnvKind kind, const TemplateProviderConfig& config = {});

/// A^r = A everywhere.
std::unique_ptr<RelevantSetProvider> make_full_action_provider(const Environment& env);

struct StateSetValidation {
  int samples = 0;
  int feasible = 0;
  double feasible_fraction() const { return samples > 0 ? static_cast<double>(feasible) / samples : 0.0; }
};

/// Draws states uniformly from the interval hull of S^r (rejecting those
/// outside S^r) and counts how often the template program is feasible.
StateSetValidation validate_relevant_states(const TemplateProvider& provider, const Environment& env, int samples,
                                            Rng& rng);

}  // namespace maskrl
