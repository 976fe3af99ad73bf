#include <maskrl/convex/containment.hpp>

#include <maskrl/convex/linear_program.hpp>

#include <limits>
#include <stdexcept>

namespace maskrl {

ContainmentResult zonotope_containment(const Zonotope& inner, const Zonotope& outer) {
  if (inner.dim() != outer.dim()) throw std::invalid_argument("zonotope_containment: dimension mismatch");
  const Index n = inner.dim();
  const Index pi = inner.num_generators();
  const Index po = outer.num_generators();

  // Variables: Γ (po×pi, column major) | β (po) | |Γ| bounds | |β| bounds | t
  const Index ng = po * pi;
  const Index off_beta = ng;
  const Index off_tg = off_beta + po;
  const Index off_tb = off_tg + ng;
  const Index off_t = off_tb + po;
  const Index nv = off_t + 1;
  auto gamma_idx = [po](Index r, Index c) { return c * po + r; };

  LinearProgram lp(nv);
  lp.objective(off_t) = 1.0;
  lp.lower.segment(off_tg, ng + po + 1).setZero();

  lp.eq_matrix = Matrix::Zero(n * pi + n, nv);
  lp.eq_rhs = Vector::Zero(n * pi + n);
  const Matrix& go = outer.generators();
  for (Index c = 0; c < pi; ++c) {
    for (Index row = 0; row < n; ++row) {
      const Index e = c * n + row;
      for (Index k = 0; k < po; ++k) lp.eq_matrix(e, gamma_idx(k, c)) = go(row, k);
      lp.eq_rhs(e) = inner.generators()(row, c);
    }
  }
  for (Index row = 0; row < n; ++row) {
    const Index e = n * pi + row;
    for (Index k = 0; k < po; ++k) lp.eq_matrix(e, off_beta + k) = go(row, k);
    lp.eq_rhs(e) = outer.center()(row) - inner.center()(row);
  }

  const Index m_in = 2 * ng + 2 * po + po;
  lp.ineq_matrix = Matrix::Zero(m_in, nv);
  lp.ineq_rhs = Vector::Zero(m_in);
  Index r = 0;
  for (Index k = 0; k < ng; ++k) {
    lp.ineq_matrix(r, k) = 1.0;
    lp.ineq_matrix(r++, off_tg + k) = -1.0;
    lp.ineq_matrix(r, k) = -1.0;
    lp.ineq_matrix(r++, off_tg + k) = -1.0;
  }
  for (Index k = 0; k < po; ++k) {
    lp.ineq_matrix(r, off_beta + k) = 1.0;
    lp.ineq_matrix(r++, off_tb + k) = -1.0;
    lp.ineq_matrix(r, off_beta + k) = -1.0;
    lp.ineq_matrix(r++, off_tb + k) = -1.0;
  }
  for (Index k = 0; k < po; ++k) {
    for (Index c = 0; c < pi; ++c) lp.ineq_matrix(r, off_tg + gamma_idx(k, c)) = 1.0;
    lp.ineq_matrix(r, off_tb + k) = 1.0;
    lp.ineq_matrix(r++, off_t) = -1.0;
  }

  ContainmentResult result;
  const LpResult sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible) {
    result.norm = std::numeric_limits<double>::infinity();
    return result;
  }
  if (sol.status == LpStatus::unbounded) throw LpError("zonotope_containment: unbounded certificate program");

  ContainmentCertificate cert;
  cert.gamma.resize(po, pi);
  for (Index c = 0; c < pi; ++c)
    for (Index k = 0; k < po; ++k) cert.gamma(k, c) = sol.x(gamma_idx(k, c));
  cert.beta = sol.x.segment(off_beta, po);

  Matrix joined(po, pi + 1);
  joined << cert.gamma, cert.beta;
  result.norm = po > 0 ? joined.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  result.certified = result.norm <= 1.0 + 1e-9 && certificate_residual(inner, outer, cert) <= 1e-8;
  if (result.certified) result.certificate = std::move(cert);
  return result;
}

double certificate_residual(const Zonotope& inner, const Zonotope& outer, const ContainmentCertificate& cert) {
  double worst = 0.0;
  if (inner.num_generators() > 0)
    worst = (outer.generators() * cert.gamma - inner.generators()).cwiseAbs().maxCoeff();
  worst = std::max(worst, (outer.generators() * cert.beta - (outer.center() - inner.center())).cwiseAbs().maxCoeff());
  if (cert.beta.size() > 0) {
    Matrix joined(cert.gamma.rows(), cert.gamma.cols() + 1);
    joined << cert.gamma, cert.beta;
    worst = std::max(worst, joined.cwiseAbs().rowwise().sum().maxCoeff() - 1.0);
  }
  return worst;
}

}  // namespace maskrl
