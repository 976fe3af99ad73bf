#pragma once

#include <maskrl/types.hpp>

namespace maskrl {

/// N(mean, diag(exp(log_std))²).
struct DiagGaussian {
  Vector mean;
  Vector log_std;

  Index dim() const { return mean.size(); }
  Vector std() const { return log_std.array().exp(); }

  double log_prob(const Vector& x) const;
  double entropy() const;
  Vector sample(Rng& rng) const;

  /// ∂ log p(x) / ∂ mean
  Vector score_mean(const Vector& x) const;
  /// ∂ log p(x) / ∂ log_std
  Vector score_log_std(const Vector& x) const;
};

/// Gradient of a log-density with respect to the Gaussian parameters.
struct GaussianGradient {
  Vector mean;
  Vector log_std;
};

GaussianGradient base_score(const DiagGaussian& dist, const Vector& x);

}  // namespace maskrl
