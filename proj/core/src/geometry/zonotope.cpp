#include <maskrl/geometry/zonotope.hpp>

#include <maskrl/convex/linear_program.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace maskrl {

IntervalBox::IntervalBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw std::invalid_argument("IntervalBox: bound sizes differ");
  if (!lower_.allFinite() || !upper_.allFinite()) throw std::invalid_argument("IntervalBox: non-finite bound");
  if ((lower_.array() > upper_.array()).any()) throw std::invalid_argument("IntervalBox: lower > upper");
}

bool IntervalBox::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) throw std::invalid_argument("IntervalBox::contains: dimension mismatch");
  return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
}

Vector IntervalBox::clamp(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("IntervalBox::clamp: dimension mismatch");
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Halfspace::Halfspace(Vector n, double b) : normal(std::move(n)), offset(b) {
  if (!(normal.norm() > 0.0)) throw std::invalid_argument("Halfspace: zero normal");
  if (!normal.allFinite() || !std::isfinite(offset)) throw std::invalid_argument("Halfspace: non-finite data");
}

Zonotope::Zonotope(Vector center, Matrix generators) : center_(std::move(center)), generators_(std::move(generators)) {
  if (generators_.cols() == 0) generators_.resize(center_.size(), 0);
  if (generators_.rows() != center_.size()) throw std::invalid_argument("Zonotope: inconsistent dimensions");
  if (!center_.allFinite() || !generators_.allFinite()) throw std::invalid_argument("Zonotope: non-finite entries");
}

Zonotope Zonotope::point(Vector center) {
  const Index n = center.size();
  return Zonotope(std::move(center), Matrix(n, 0));
}

Zonotope Zonotope::from_box(const IntervalBox& box) {
  return Zonotope(box.center(), box.radius().asDiagonal().toDenseMatrix());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  Matrix g(a.dim(), a.num_generators() + b.num_generators());
  g << a.generators(), b.generators();
  return Zonotope(a.center() + b.center(), std::move(g));
}

Zonotope linear_map(const Matrix& m, const Zonotope& z) {
  if (m.cols() != z.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
  return Zonotope(m * z.center(), m * z.generators());
}

Zonotope translate(const Zonotope& z, const Vector& offset) {
  if (offset.size() != z.dim()) throw std::invalid_argument("translate: dimension mismatch");
  return Zonotope(z.center() + offset, z.generators());
}

double support_function(const Zonotope& z, const Vector& direction) {
  if (direction.size() != z.dim()) throw std::invalid_argument("support_function: dimension mismatch");
  return direction.dot(z.center()) + (z.generators().transpose() * direction).cwiseAbs().sum();
}

IntervalBox interval_hull(const Zonotope& z) {
  const Vector r = z.generators().cwiseAbs().rowwise().sum();
  return IntervalBox(z.center() - r, z.center() + r);
}

bool contains_point(const Zonotope& z, const Vector& x, double tol) {
  if (x.size() != z.dim()) throw std::invalid_argument("contains_point: dimension mismatch");
  if (tol < 0.0) throw std::invalid_argument("contains_point: negative tolerance");
  const Index n = z.dim();
  const Index p = z.num_generators();
  const Vector rhs = x - z.center();
  if (p == 0) return rhs.cwiseAbs().maxCoeff() <= kMembershipTol * std::max(1.0, x.cwiseAbs().maxCoeff());

  // minimize t  s.t.  Gγ = x - c,  -t <= γᵢ <= t
  LinearProgram lp(p + 1);
  lp.objective(p) = 1.0;
  lp.lower(p) = 0.0;
  lp.eq_matrix.resize(n, p + 1);
  lp.eq_matrix << z.generators(), Vector::Zero(n);
  lp.eq_rhs = rhs;
  lp.ineq_matrix = Matrix::Zero(2 * p, p + 1);
  lp.ineq_rhs = Vector::Zero(2 * p);
  for (Index i = 0; i < p; ++i) {
    lp.ineq_matrix(2 * i, i) = 1.0;
    lp.ineq_matrix(2 * i, p) = -1.0;
    lp.ineq_matrix(2 * i + 1, i) = -1.0;
    lp.ineq_matrix(2 * i + 1, p) = -1.0;
  }
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::infeasible) return false;
  if (r.status == LpStatus::unbounded) throw LpError("contains_point: unbounded membership program");
  return r.x(p) <= 1.0 + tol;
}

BoundaryPoint boundary_point(const Zonotope& z, const Vector& x, const Vector& direction) {
  if (x.size() != z.dim() || direction.size() != z.dim())
    throw std::invalid_argument("boundary_point: dimension mismatch");
  if (!(direction.norm() > 0.0)) throw std::invalid_argument("boundary_point: zero direction");
  const Index n = z.dim();
  const Index p = z.num_generators();
  if (p == 0) {
    if ((x - z.center()).cwiseAbs().maxCoeff() > kMembershipTol * std::max(1.0, x.cwiseAbs().maxCoeff()))
      throw std::domain_error("boundary_point: start point outside the zonotope");
    return {x, 0.0};
  }

  // maximize α  s.t.  Gγ - αu = x - c,  |γ| <= 1,  α >= 0, with u = d/|d|
  const double scale = direction.norm();
  const Vector unit = direction / scale;
  LinearProgram lp(p + 1);
  lp.objective(p) = -1.0;
  lp.lower.head(p).setConstant(-1.0);
  lp.upper.head(p).setConstant(1.0);
  lp.lower(p) = 0.0;
  lp.eq_matrix.resize(n, p + 1);
  lp.eq_matrix << z.generators(), -unit;
  lp.eq_rhs = x - z.center();
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::infeasible) throw std::domain_error("boundary_point: start point outside the zonotope");
  if (r.status == LpStatus::unbounded) throw LpError("boundary_point: unbounded ray in a bounded set");
  const double alpha = std::max(0.0, r.x(p)) / scale;
  return {x + alpha * direction, alpha};
}

void to_json(nlohmann::json& j, const Zonotope& z) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < z.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < z.num_generators(); ++k) row.push_back(z.generators()(i, k));
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"center", std::vector<double>(z.center().data(), z.center().data() + z.dim())},
                     {"generators", std::move(rows)}};
}

void from_json(const nlohmann::json& j, Zonotope& z) {
  const auto c = j.at("center").get<std::vector<double>>();
  const auto& rows = j.at("generators");
  if (!rows.is_array() || rows.size() != c.size()) throw std::invalid_argument("Zonotope JSON: generator rows must match center length");
  const Index n = static_cast<Index>(c.size());
  const Index p = n > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i) {
    const auto row = rows.at(static_cast<size_t>(i)).get<std::vector<double>>();
    if (static_cast<Index>(row.size()) != p) throw std::invalid_argument("Zonotope JSON: ragged generator matrix");
    for (Index k = 0; k < p; ++k) g(i, k) = row[static_cast<size_t>(k)];
  }
  z = Zonotope(Eigen::Map<const Vector>(c.data(), n), std::move(g));
}

}  // namespace maskrl
