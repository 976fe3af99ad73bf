#pragma once

#include <maskrl/masking/cubature.hpp>
#include <maskrl/masking/gaussian.hpp>
#include <maskrl/masking/hit_and_run.hpp>

#include <string>

namespace maskrl {

enum class MaskKind { none, replacement, ray, generator, distributional };

const char* to_string(MaskKind kind);
MaskKind parse_mask_kind(const std::string& name);

/// Affine map between an environment's action box and [-1, 1]^N. Masks work
/// in the normalized space; relevant sets are carried over with it.
class ActionNormalizer {
 public:
  ActionNormalizer() = default;
  explicit ActionNormalizer(IntervalBox box);

  const IntervalBox& box() const { return box_; }
  IntervalBox unit_box() const;
  Vector to_env(const Vector& normalized) const;
  Vector to_normalized(const Vector& action) const;
  Zonotope to_normalized(const Zonotope& set) const;

 private:
  IntervalBox box_;
  Vector center_;
  Vector radius_;
};

/// If a ∈ A^r return a, otherwise a uniform hit-and-run draw from A^r.
Vector replacement_filter(const Vector& a, const Zonotope& relevant, Rng& rng, bool* replaced = nullptr);

/// Everything the update needs about one masked action.
struct MaskStep {
  /// Policy-space sample: the pre-map action a, or the latent β for the generator mask.
  Vector raw;
  /// Executed action in normalized coordinates.
  Vector executed;
  /// A^r in normalized coordinates.
  Zonotope relevant;
  double log_prob = 0.0;
  bool clamped = false;
  bool replaced = false;
  bool underflow = false;
};

struct MaskEvaluation {
  double log_prob = 0.0;
  GaussianGradient grad;
  bool underflow = false;
};

/// Policy-side view of a masking variant. The wrapped policy is any diagonal
/// Gaussian over the policy space (dimension N, or P for the generator mask).
class MaskedPolicy {
 public:
  MaskedPolicy(MaskKind kind, Index action_dim, Index num_generators = 0);

  MaskKind kind() const { return kind_; }
  Index action_dim() const { return action_dim_; }
  Index policy_dim() const { return kind_ == MaskKind::generator ? num_generators_ : action_dim_; }

  void set_cubature_options(const CubatureOptions& options) { cubature_ = options; }
  void set_hit_and_run_options(const HitAndRunOptions& options) { hit_and_run_ = options; }

  /// Draws (or, deterministically, picks) an action for the given A^r.
  MaskStep act(const DiagGaussian& dist, const Zonotope& relevant, Rng& rng, bool deterministic = false) const;

  /// log π^r of a stored step under `dist` and the score used by the update:
  ///   none, replacement, ray: base log-density and score of the raw action
  ///   generator: the Gaussian pushed through c + Gβ and its exact score
  ///   distributional: truncated log-density; score without the integral term
  MaskEvaluation evaluate(const DiagGaussian& dist, const MaskStep& step) const;

 private:
  MaskKind kind_;
  Index action_dim_;
  Index num_generators_;
  IntervalBox unit_box_;
  CubatureOptions cubature_;
  HitAndRunOptions hit_and_run_;
};

}  // namespace maskrl
