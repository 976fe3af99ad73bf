#include <maskrl/masking/generator_mask.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maskrl {

namespace {

Eigen::LLT<Matrix> factor(const Matrix& g, const Vector& variance) {
  Matrix cov = g * variance.asDiagonal() * g.transpose();
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) {
    // rank-deficient G can still factor with pivots at rounding level
    const double floor = 1e-13 * std::max(1.0, cov.diagonal().maxCoeff());
    if (llt.matrixLLT().diagonal().array().square().minCoeff() > floor) return llt;
  }
  cov.diagonal().array() += kCovarianceJitter;
  llt.compute(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("generator mask: covariance is singular after jitter");
  return llt;
}

void check(const Vector& ar, const DiagGaussian& latent, const Zonotope& relevant) {
  if (ar.size() != relevant.dim()) throw std::invalid_argument("generator mask: action dimension mismatch");
  if (latent.dim() != relevant.num_generators())
    throw std::invalid_argument("generator mask: latent dimension must equal the generator count");
}

}  // namespace

Vector generator_action(const Vector& beta, const Zonotope& relevant, bool* clamped) {
  if (beta.size() != relevant.num_generators()) throw std::invalid_argument("generator_action: latent dimension mismatch");
  const Vector b = beta.cwiseMax(-1.0).cwiseMin(1.0);
  if (clamped) *clamped = (b.array() != beta.array()).any();
  return relevant.center() + relevant.generators() * b;
}

double generator_log_prob(const Vector& ar, const DiagGaussian& latent, const Zonotope& relevant) {
  check(ar, latent, relevant);
  const Matrix& g = relevant.generators();
  const auto llt = factor(g, (2.0 * latent.log_std.array()).exp().matrix());
  const Vector d = ar - relevant.center() - g * latent.mean;
  const Vector z = llt.matrixL().solve(d);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double n = static_cast<double>(ar.size());
  return -0.5 * z.squaredNorm() - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GeneratorScore generator_score(const Vector& ar, const DiagGaussian& latent, const Zonotope& relevant) {
  check(ar, latent, relevant);
  const Matrix& g = relevant.generators();
  const Vector variance = (2.0 * latent.log_std.array()).exp().matrix();
  const auto llt = factor(g, variance);
  const Index n = ar.size();
  const Matrix cov_inv = llt.solve(Matrix::Identity(n, n));
  const Vector d = ar - relevant.center() - g * latent.mean;
  const Vector u = cov_inv * d;
  GeneratorScore out;
  out.mean = g.transpose() * u;
  out.sigma = 0.5 * g.transpose() * (u * u.transpose() - cov_inv) * g;
  out.log_std = 2.0 * variance.cwiseProduct(out.sigma.diagonal());
  return out;
}

}  // namespace maskrl
