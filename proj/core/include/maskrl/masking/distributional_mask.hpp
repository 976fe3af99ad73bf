#pragma once

#include <maskrl/masking/cubature.hpp>
#include <maskrl/masking/gaussian.hpp>

namespace maskrl {

/// Smallest value the enclosed probability mass is allowed to take.
inline constexpr double kIntegralFloor = 1e-300;

struct DistributionalLogProb {
  double log_prob = 0.0;
  double integral = 0.0;
  bool underflow = false;
};

/// log π(a^r) - log ∫_{A^r} π, the log-density of the policy truncated to A^r.
DistributionalLogProb dist_log_prob(const Vector& ar, const DiagGaussian& dist, const Zonotope& relevant,
                                    const CubatureOptions& options = {});

/// Gradient with the integral treated as a constant: the base score at a^r.
GaussianGradient dist_score(const Vector& ar, const DiagGaussian& dist);

/// Hit-and-run draw from the truncated policy, started at the center of A^r.
Vector dist_sample(const DiagGaussian& dist, const Zonotope& relevant, Rng& rng, const HitAndRunOptions& options = {});

/// The mean if it lies in A^r, otherwise the boundary point from the center toward the mean.
Vector dist_deterministic(const DiagGaussian& dist, const Zonotope& relevant);

}  // namespace maskrl
