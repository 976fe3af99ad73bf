#include <maskrl/masking/masked_policy.hpp>

#include <maskrl/masking/distributional_mask.hpp>
#include <maskrl/masking/generator_mask.hpp>
#include <maskrl/masking/ray_mask.hpp>

#include <stdexcept>

namespace maskrl {

const char* to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::none:
      return "none";
    case MaskKind::replacement:
      return "replacement";
    case MaskKind::ray:
      return "ray";
    case MaskKind::generator:
      return "generator";
    case MaskKind::distributional:
      return "distributional";
  }
  return "unknown";
}

MaskKind parse_mask_kind(const std::string& name) {
  if (name == "none" || name == "baseline") return MaskKind::none;
  if (name == "replacement") return MaskKind::replacement;
  if (name == "ray") return MaskKind::ray;
  if (name == "generator") return MaskKind::generator;
  if (name == "distributional") return MaskKind::distributional;
  throw std::invalid_argument("unknown mask '" + name + "' (expected none, replacement, ray, generator or distributional)");
}

ActionNormalizer::ActionNormalizer(IntervalBox box)
    : box_(std::move(box)), center_(box_.center()), radius_(box_.radius()) {
  if (!(radius_.array() > 0.0).all()) throw std::invalid_argument("ActionNormalizer: degenerate action box");
}

IntervalBox ActionNormalizer::unit_box() const {
  return {Vector::Constant(box_.dim(), -1.0), Vector::Constant(box_.dim(), 1.0)};
}

Vector ActionNormalizer::to_env(const Vector& normalized) const {
  return center_ + radius_.cwiseProduct(normalized);
}

Vector ActionNormalizer::to_normalized(const Vector& action) const {
  return (action - center_).cwiseQuotient(radius_);
}

Zonotope ActionNormalizer::to_normalized(const Zonotope& set) const {
  const Vector inv = radius_.cwiseInverse();
  return Zonotope((set.center() - center_).cwiseProduct(inv), inv.asDiagonal() * set.generators());
}

Vector replacement_filter(const Vector& a, const Zonotope& relevant, Rng& rng, bool* replaced) {
  const bool inside = contains_point(relevant, a);
  if (replaced) *replaced = !inside;
  if (inside) return a;
  return hit_and_run_sample({}, relevant, relevant.center(), rng);
}

MaskedPolicy::MaskedPolicy(MaskKind kind, Index action_dim, Index num_generators)
    : kind_(kind),
      action_dim_(action_dim),
      num_generators_(num_generators),
      unit_box_(Vector::Constant(action_dim, -1.0), Vector::Constant(action_dim, 1.0)) {
  if (action_dim < 1) throw std::invalid_argument("MaskedPolicy: action dimension must be positive");
  if (kind == MaskKind::generator && num_generators < 1)
    throw std::invalid_argument("MaskedPolicy: the generator mask needs the template generator count");
}

MaskStep MaskedPolicy::act(const DiagGaussian& dist, const Zonotope& relevant, Rng& rng, bool deterministic) const {
  if (dist.dim() != policy_dim()) throw std::invalid_argument("MaskedPolicy::act: policy dimension mismatch");
  if (relevant.dim() != action_dim_) throw std::invalid_argument("MaskedPolicy::act: relevant set dimension mismatch");
  MaskStep step;
  step.relevant = relevant;
  switch (kind_) {
    case MaskKind::none: {
      step.raw = deterministic ? dist.mean : dist.sample(rng);
      step.executed = unit_box_.clamp(step.raw);
      break;
    }
    case MaskKind::replacement: {
      step.raw = deterministic ? dist.mean : dist.sample(rng);
      step.executed = replacement_filter(step.raw, relevant, rng, &step.replaced);
      break;
    }
    case MaskKind::ray: {
      step.raw = deterministic ? dist.mean : dist.sample(rng);
      try {
        step.executed = ray_map(unit_box_.clamp(step.raw), relevant, unit_box_).point;
      } catch (const std::domain_error&) {
        // A^r touches the action bounds at its center, so it is flat there.
        step.executed = relevant.center();
        step.clamped = true;
      }
      break;
    }
    case MaskKind::generator: {
      if (relevant.num_generators() != num_generators_)
        throw std::invalid_argument("MaskedPolicy::act: relevant set has the wrong generator count");
      step.raw = deterministic ? dist.mean : dist.sample(rng);
      step.executed = generator_action(step.raw, relevant, &step.clamped);
      break;
    }
    case MaskKind::distributional: {
      step.raw = deterministic ? dist_deterministic(dist, relevant) : dist_sample(dist, relevant, rng, hit_and_run_);
      step.executed = step.raw;
      break;
    }
  }
  const MaskEvaluation eval = evaluate(dist, step);
  step.log_prob = eval.log_prob;
  step.underflow = eval.underflow;
  return step;
}

MaskEvaluation MaskedPolicy::evaluate(const DiagGaussian& dist, const MaskStep& step) const {
  MaskEvaluation out;
  switch (kind_) {
    case MaskKind::none:
    case MaskKind::replacement:
    case MaskKind::ray:
      out.log_prob = dist.log_prob(step.raw);
      out.grad = base_score(dist, step.raw);
      break;
    case MaskKind::generator: {
      // The unclamped image c + Gβ carries the density; clamping only affects execution.
      const Vector ar = step.relevant.center() + step.relevant.generators() * step.raw;
      out.log_prob = generator_log_prob(ar, dist, step.relevant);
      const GeneratorScore s = generator_score(ar, dist, step.relevant);
      out.grad = {s.mean, s.log_std};
      break;
    }
    case MaskKind::distributional: {
      const DistributionalLogProb lp = dist_log_prob(step.raw, dist, step.relevant, cubature_);
      out.log_prob = lp.log_prob;
      out.underflow = lp.underflow;
      out.grad = dist_score(step.raw, dist);
      break;
    }
  }
  return out;
}

}  // namespace maskrl
