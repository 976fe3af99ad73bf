#include <maskrl/relevant/linearize.hpp>

#include <cmath>
#include <stdexcept>

namespace maskrl {

Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exponential: matrix must be square");
  const Index n = m.rows();
  const double norm = n > 0 ? m.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m / std::ldexp(1.0, squarings);
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 12; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

LinearizedStep linearize_step(const DynamicsModel& model, const Vector& s, const Vector& a_mid, double dt,
                              const Zonotope& disturbance, double eps_lin) {
  if (!(dt > 0.0)) throw std::invalid_argument("linearize_step: dt must be positive");
  if (eps_lin < 0.0) throw std::invalid_argument("linearize_step: eps_lin must be non-negative");
  const Index ns = model.state_dim();
  const Index na = model.action_dim();
  const Index nw = model.disturbance_dim();
  if (s.size() != ns || a_mid.size() != na || disturbance.dim() != nw)
    throw std::invalid_argument("linearize_step: dimension mismatch");

  const Vector w0 = Vector::Zero(nw);
  const Matrix js = model.state_jacobian(s, a_mid, w0);
  const Matrix ja = model.action_jacobian(s, a_mid, w0);
  const Matrix jw = model.disturbance_jacobian(s, a_mid, w0);
  const Vector r = model.derivative(s, a_mid, w0) - js * s - ja * a_mid;

  const Index size = ns + na + nw + 1;
  Matrix aug = Matrix::Zero(size, size);
  aug.block(0, 0, ns, ns) = js;
  aug.block(0, ns, ns, na) = ja;
  if (nw > 0) aug.block(0, ns + na, ns, nw) = jw;
  aug.block(0, ns + na + nw, ns, 1) = r;
  const Matrix e = matrix_exponential(aug * dt);

  LinearizedStep lin;
  lin.dt = dt;
  lin.a_d = e.block(0, 0, ns, ns);
  lin.b_d = e.block(0, ns, ns, na);
  const Matrix b_w = e.block(0, ns + na, ns, nw);
  const Vector v = e.block(0, ns + na + nw, ns, 1);
  const Zonotope discretized(v + b_w * disturbance.center(), b_w * disturbance.generators());
  if (eps_lin > 0.0)
    lin.w_prime = minkowski_sum(discretized, Zonotope(Vector::Zero(ns), eps_lin * Matrix::Identity(ns, ns)));
  else
    lin.w_prime = discretized;
  return lin;
}

}  // namespace maskrl
