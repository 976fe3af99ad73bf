#include <maskrl/masking/distributional_mask.hpp>

#include <cmath>

namespace maskrl {

DistributionalLogProb dist_log_prob(const Vector& ar, const DiagGaussian& dist, const Zonotope& relevant,
                                    const CubatureOptions& options) {
  DistributionalLogProb out;
  const CubatureResult mass = cubature_integral([&](const Vector& x) { return dist.log_prob(x); }, relevant, options);
  out.integral = mass.value;
  if (!(mass.value >= kIntegralFloor)) {
    out.integral = kIntegralFloor;
    out.underflow = true;
  }
  out.log_prob = dist.log_prob(ar) - std::log(out.integral);
  return out;
}

GaussianGradient dist_score(const Vector& ar, const DiagGaussian& dist) { return base_score(dist, ar); }

Vector dist_sample(const DiagGaussian& dist, const Zonotope& relevant, Rng& rng, const HitAndRunOptions& options) {
  return hit_and_run_sample([&](const Vector& x) { return dist.log_prob(x); }, relevant, relevant.center(), rng,
                            options);
}

Vector dist_deterministic(const DiagGaussian& dist, const Zonotope& relevant) {
  if (contains_point(relevant, dist.mean)) return dist.mean;
  return boundary_point(relevant, relevant.center(), dist.mean - relevant.center()).point;
}

}  // namespace maskrl
