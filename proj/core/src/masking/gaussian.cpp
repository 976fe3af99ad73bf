#include <maskrl/masking/gaussian.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskrl {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

double DiagGaussian::log_prob(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("DiagGaussian::log_prob: dimension mismatch");
  const Eigen::ArrayXd z = (x - mean).array() / log_std.array().exp();
  return (-0.5 * z.square() - log_std.array() - kHalfLog2Pi).sum();
}

double DiagGaussian::entropy() const { return (log_std.array() + 0.5 + kHalfLog2Pi).sum(); }

Vector DiagGaussian::sample(Rng& rng) const {
  std::normal_distribution<double> normal;
  Vector x(dim());
  for (Index i = 0; i < dim(); ++i) x(i) = mean(i) + std::exp(log_std(i)) * normal(rng);
  return x;
}

Vector DiagGaussian::score_mean(const Vector& x) const {
  return ((x - mean).array() / (2.0 * log_std.array()).exp()).matrix();
}

Vector DiagGaussian::score_log_std(const Vector& x) const {
  const Eigen::ArrayXd z = (x - mean).array() / log_std.array().exp();
  return (z.square() - 1.0).matrix();
}

GaussianGradient base_score(const DiagGaussian& dist, const Vector& x) {
  return {dist.score_mean(x), dist.score_log_std(x)};
}

}  // namespace maskrl
