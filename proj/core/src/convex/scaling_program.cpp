#include <maskrl/convex/scaling_program.hpp>

#include <maskrl/convex/linear_program.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maskrl {

namespace {

void append_row(Matrix& m, Vector& rhs, const Vector& row, double value) {
  const Index r = m.rows();
  Matrix grown(r + 1, row.size());
  if (r > 0) grown.topRows(r) = m;
  grown.row(r) = row.transpose();
  m = std::move(grown);
  rhs.conservativeResize(r + 1);
  rhs(r) = value;
}

void widen(Matrix& m, Index cols) {
  if (m.cols() == cols) return;
  Matrix grown = Matrix::Zero(m.rows(), cols);
  grown.leftCols(m.cols()) = m;
  m = std::move(grown);
}

void check_inner(const ScalingProgram& program, const AffineZonotope& inner) {
  const Index n = inner.dim();
  if (inner.center_map.rows() != n || inner.center_map.cols() != program.dim())
    throw std::invalid_argument("AffineZonotope: center map has the wrong shape");
  if (inner.fixed_generators.rows() != n && inner.fixed_generators.size() != 0)
    throw std::invalid_argument("AffineZonotope: fixed generators have the wrong row count");
  if (inner.scaled_generators.rows() != n || inner.scaled_generators.cols() != program.num_scalings())
    throw std::invalid_argument("AffineZonotope: scaled generators must have one column per scaling");
}

Matrix fixed_part(const AffineZonotope& z) {
  if (z.fixed_generators.size() == 0) return Matrix(z.dim(), 0);
  return z.fixed_generators;
}

}  // namespace

Zonotope AffineZonotope::evaluate(const Vector& center, const Vector& scalings) const {
  const Matrix fixed = fixed_part(*this);
  Matrix g(dim(), fixed.cols() + scaled_generators.cols());
  g << fixed, scaled_generators * scalings.asDiagonal();
  return Zonotope(offset + center_map * center, std::move(g));
}

ScalingProgram::ScalingProgram(Matrix template_generators, double positivity_floor)
    : template_(std::move(template_generators)), floor_(positivity_floor) {
  if (template_.rows() < 1 || template_.cols() < 1) throw std::invalid_argument("ScalingProgram: empty template");
  if (!template_.allFinite()) throw std::invalid_argument("ScalingProgram: non-finite template");
  if (!(floor_ > 0.0)) throw std::invalid_argument("ScalingProgram: positivity floor must be positive");
  ineq_.resize(0, num_variables());
  eq_.resize(0, num_variables());
}

void ScalingProgram::fix_center(const Vector& center) {
  if (center.size() != dim()) throw std::invalid_argument("ScalingProgram::fix_center: dimension mismatch");
  for (Index i = 0; i < dim(); ++i) {
    Vector row = Vector::Zero(num_variables());
    row(center_offset() + i) = 1.0;
    add_equality(row, center(i));
  }
}

Index ScalingProgram::add_aux(Index count) {
  const Index first = aux_offset() + num_aux_;
  num_aux_ += count;
  widen(ineq_, num_variables());
  widen(eq_, num_variables());
  return first;
}

void ScalingProgram::add_inequality(const Vector& row, double rhs) {
  if (row.size() != num_variables()) throw std::invalid_argument("ScalingProgram::add_inequality: row length mismatch");
  if (!row.allFinite() || !std::isfinite(rhs)) throw std::invalid_argument("ScalingProgram::add_inequality: non-finite data");
  append_row(ineq_, ineq_rhs_, row, rhs);
}

void ScalingProgram::add_equality(const Vector& row, double rhs) {
  if (row.size() != num_variables()) throw std::invalid_argument("ScalingProgram::add_equality: row length mismatch");
  if (!row.allFinite() || !std::isfinite(rhs)) throw std::invalid_argument("ScalingProgram::add_equality: non-finite data");
  append_row(eq_, eq_rhs_, row, rhs);
}

AffineZonotope ScalingProgram::relevant_set() const {
  return {Vector::Zero(dim()), Matrix::Identity(dim(), dim()), Matrix(dim(), 0), template_};
}

ScalingProgram ScalingProgram::permuted(const std::vector<Index>& ineq_order) const {
  if (static_cast<Index>(ineq_order.size()) != ineq_.rows()) throw std::invalid_argument("ScalingProgram::permuted: bad order");
  ScalingProgram out = *this;
  for (Index r = 0; r < ineq_.rows(); ++r) {
    out.ineq_.row(r) = ineq_.row(ineq_order[static_cast<size_t>(r)]);
    out.ineq_rhs_(r) = ineq_rhs_(ineq_order[static_cast<size_t>(r)]);
  }
  return out;
}

nlohmann::json ScalingProgram::to_json() const {
  auto mat = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"template", mat(template_)}, {"floor", floor_},          {"num_aux", num_aux_},
          {"ineq", mat(ineq_)},        {"ineq_rhs", vec(ineq_rhs_)}, {"eq", mat(eq_)},
          {"eq_rhs", vec(eq_rhs_)}};
}

void add_containment(ScalingProgram& program, const AffineZonotope& inner, const Zonotope& outer) {
  check_inner(program, inner);
  if (outer.dim() != inner.dim()) throw std::invalid_argument("add_containment: dimension mismatch");
  const Index n = inner.dim();
  const Index po = outer.num_generators();
  const Index nc = program.dim();
  const Index ns = program.num_scalings();
  const Matrix fixed = fixed_part(inner);
  const Index nf = fixed.cols();
  const Matrix& go = outer.generators();
  const Vector center_gap = outer.center() - inner.offset;

  if (po == n) {
    Eigen::FullPivLU<Matrix> lu(go);
    if (lu.isInvertible() && lu.rcond() > 1e-12) {
      // Unique certificate: Γ = G⁻¹[F, S diag p̃], β = G⁻¹(c_o - offset - M c).
      const Matrix inv = lu.inverse();
      const Matrix gamma_fixed = inv * fixed;
      const Matrix gamma_scaled = (inv * inner.scaled_generators).cwiseAbs();
      const Vector beta_const = inv * center_gap;
      const Matrix beta_center = inv * inner.center_map;
      for (Index i = 0; i < n; ++i) {
        const double used = nf > 0 ? gamma_fixed.row(i).cwiseAbs().sum() : 0.0;
        for (double sign : {1.0, -1.0}) {
          Vector row = Vector::Zero(program.num_variables());
          row.segment(program.center_offset(), nc) = -sign * beta_center.row(i).transpose();
          row.segment(program.scaling_offset(), ns) = gamma_scaled.row(i).transpose();
          program.add_inequality(row, 1.0 - used - sign * beta_const(i));
        }
      }
      return;
    }
  }

  // Γ_F (po×nf) and β are determined by linear equalities; Γ_S (po×ns) too.
  // Variables per block: value then absolute-value bound.
  const Index n_gamma = po * (nf + ns);
  const Index first = program.add_aux(2 * n_gamma + 2 * po);
  const Index off_gamma = first;
  const Index off_beta = off_gamma + n_gamma;
  const Index off_abs_gamma = off_beta + po;
  const Index off_abs_beta = off_abs_gamma + n_gamma;
  auto gamma_idx = [&](Index r, Index col) { return off_gamma + col * po + r; };
  const Index nv = program.num_variables();

  for (Index col = 0; col < nf + ns; ++col) {
    for (Index row_i = 0; row_i < n; ++row_i) {
      Vector row = Vector::Zero(nv);
      for (Index k = 0; k < po; ++k) row(gamma_idx(k, col)) = go(row_i, k);
      double rhs = 0.0;
      if (col < nf)
        rhs = fixed(row_i, col);
      else
        row(program.scaling_offset() + (col - nf)) = -inner.scaled_generators(row_i, col - nf);
      program.add_equality(row, rhs);
    }
  }
  for (Index row_i = 0; row_i < n; ++row_i) {
    Vector row = Vector::Zero(nv);
    for (Index k = 0; k < po; ++k) row(off_beta + k) = go(row_i, k);
    row.segment(program.center_offset(), nc) = inner.center_map.row(row_i).transpose();
    program.add_equality(row, center_gap(row_i));
  }
  for (Index k = 0; k < n_gamma + po; ++k) {
    for (double sign : {1.0, -1.0}) {
      Vector row = Vector::Zero(nv);
      row(off_gamma + k) = sign;
      row(off_abs_gamma + k) = -1.0;
      program.add_inequality(row, 0.0);
    }
  }
  for (Index k = 0; k < po; ++k) {
    Vector row = Vector::Zero(nv);
    for (Index col = 0; col < nf + ns; ++col) row(off_abs_gamma + col * po + k) = 1.0;
    row(off_abs_beta + k) = 1.0;
    program.add_inequality(row, 1.0);
  }
}

void add_support_bound(ScalingProgram& program, const AffineZonotope& inner, const Vector& direction, double bound) {
  check_inner(program, inner);
  if (direction.size() != inner.dim()) throw std::invalid_argument("add_support_bound: dimension mismatch");
  const Matrix fixed = fixed_part(inner);
  Vector row = Vector::Zero(program.num_variables());
  row.segment(program.center_offset(), program.dim()) = inner.center_map.transpose() * direction;
  row.segment(program.scaling_offset(), program.num_scalings()) =
      (inner.scaled_generators.transpose() * direction).cwiseAbs();
  const double constant = direction.dot(inner.offset) + (fixed.transpose() * direction).cwiseAbs().sum();
  program.add_inequality(row, bound - constant);
}

double ScalingSolution::geometric_mean() const {
  if (scalings.size() == 0) return 0.0;
  return std::exp(scalings.array().log().mean());
}

Zonotope ScalingSolution::zonotope(const Matrix& template_generators) const {
  return Zonotope(center, template_generators * scalings.asDiagonal());
}

namespace {

// Reduced problem over y, with z = z0 + Z y:
//   maximize Σ log(p0 + P y)  s.t.  A y <= b
struct Reduced {
  Vector z0;
  Matrix basis;
  Matrix a;
  Vector b;
  Vector p0;
  Matrix p;
};

std::optional<Reduced> reduce(const ScalingProgram& program, bool include_floor) {
  const Index nv = program.num_variables();
  const Index ns = program.num_scalings();
  Reduced red;
  const Matrix& e = program.eq_matrix();
  if (e.rows() > 0) {
    Eigen::BDCSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    const double cutoff = std::max(smax, 1.0) * 1e-11 * static_cast<double>(std::max(e.rows(), nv));
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > cutoff) ++rank;
    svd.setThreshold(cutoff / std::max(smax, 1e-300));
    red.z0 = svd.solve(program.eq_rhs());
    const double res = (e * red.z0 - program.eq_rhs()).cwiseAbs().maxCoeff();
    if (res > 1e-9 * (1.0 + program.eq_rhs().cwiseAbs().maxCoeff())) return std::nullopt;
    red.basis = svd.matrixV().rightCols(nv - rank);
  } else {
    red.z0 = Vector::Zero(nv);
    red.basis = Matrix::Identity(nv, nv);
  }

  const Matrix& g = program.ineq_matrix();
  const Index extra = include_floor ? ns : 0;
  Matrix a(g.rows() + extra, nv);
  Vector b(g.rows() + extra);
  a.topRows(g.rows()) = g;
  b.head(g.rows()) = program.ineq_rhs();
  for (Index k = 0; k < extra; ++k) {
    a.row(g.rows() + k).setZero();
    a(g.rows() + k, program.scaling_offset() + k) = -1.0;
    b(g.rows() + k) = -program.positivity_floor();
  }
  red.a = a * red.basis;
  red.b = b - a * red.z0;
  red.p0 = red.z0.segment(program.scaling_offset(), ns);
  red.p = red.basis.middleRows(program.scaling_offset(), ns);
  return red;
}

// max t  s.t.  A y + t‖aᵢ‖ <= b,  t <= cap. Rows that vanish in the reduced
// space must already hold; they are reported through `constant_ok`.
struct PhaseOne {
  Vector y;
  double slack = -std::numeric_limits<double>::infinity();
};

std::optional<PhaseOne> phase_one(const Reduced& red, double cap) {
  const Index dy = red.basis.cols();
  const Index m = red.a.rows();
  Vector norms = red.a.rowwise().norm();
  double worst_const = std::numeric_limits<double>::infinity();
  std::vector<Index> active;
  for (Index j = 0; j < m; ++j) {
    if (norms(j) <= 1e-12)
      worst_const = std::min(worst_const, red.b(j));
    else
      active.push_back(j);
  }
  PhaseOne out;
  if (active.empty()) {
    out.y = Vector::Zero(dy);
    out.slack = std::min(cap, worst_const);
    return out;
  }
  LinearProgram lp(dy + 1);
  lp.objective(dy) = -1.0;
  lp.upper(dy) = cap;
  lp.ineq_matrix = Matrix::Zero(static_cast<Index>(active.size()), dy + 1);
  lp.ineq_rhs.resize(static_cast<Index>(active.size()));
  for (size_t k = 0; k < active.size(); ++k) {
    const Index j = active[k];
    lp.ineq_matrix.row(static_cast<Index>(k)).head(dy) = red.a.row(j) / norms(j);
    lp.ineq_matrix(static_cast<Index>(k), dy) = 1.0;
    lp.ineq_rhs(static_cast<Index>(k)) = red.b(j) / norms(j);
  }
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::optimal) return std::nullopt;
  out.y = r.x.head(dy);
  out.slack = std::min(r.x(dy), worst_const);
  return out;
}

}  // namespace

ScalingSolution solve_geometric_mean(const ScalingProgram& program, const BarrierOptions& options) {
  ScalingSolution sol;
  const auto red = reduce(program, true);
  if (!red) return sol;
  const auto start = phase_one(*red, 1.0);
  if (!start || !(start->slack > 1e-10)) return sol;

  const Matrix& a = red->a;
  const Vector& b = red->b;
  const Index m = a.rows();
  const Index dy = red->basis.cols();
  Vector y = start->y;

  auto scal = [&](const Vector& yy) { return Vector(red->p0 + red->p * yy); };
  auto slack = [&](const Vector& yy) { return Vector(b - a * yy); };
  auto barrier = [&](const Vector& yy, double t, bool& ok) {
    const Vector s = slack(yy);
    const Vector p = scal(yy);
    ok = (s.array() > 0.0).all() && (p.array() > 0.0).all();
    if (!ok) return std::numeric_limits<double>::infinity();
    return -t * p.array().log().sum() - s.array().log().sum();
  };

  double t = 1.0;
  int steps = 0;
  double residual = std::numeric_limits<double>::infinity();
  const double num_terms = static_cast<double>(m + red->p.rows());
  while (true) {
    // Centering
    for (int inner = 0;; ++inner) {
      const Vector s = slack(y);
      const Vector p = scal(y);
      const Vector inv_s = s.cwiseInverse();
      const Vector inv_p = p.cwiseInverse();
      const Vector grad = -t * (red->p.transpose() * inv_p) + a.transpose() * inv_s;
      Matrix h = t * red->p.transpose() * inv_p.cwiseAbs2().asDiagonal() * red->p +
                 a.transpose() * inv_s.cwiseAbs2().asDiagonal() * a;
      const double objective_scale = std::max(1.0, (red->p.transpose() * inv_p).cwiseAbs().maxCoeff());
      residual = grad.cwiseAbs().maxCoeff() / (t * objective_scale);
      if (dy == 0) break;
      Eigen::LDLT<Matrix> ldlt(h);
      Vector step = -ldlt.solve(grad);
      if (!step.allFinite()) {
        h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
        step = -Eigen::LDLT<Matrix>(h).solve(grad);
      }
      const double decrement = -grad.dot(step);
      if (!(decrement >= 0.0) || !step.allFinite())
        throw ConvergenceError("solve_geometric_mean: Newton system breakdown", residual);
      if (decrement <= 1e-12) break;
      bool ok = false;
      const double f0 = barrier(y, t, ok);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const double f1 = barrier(y + alpha * step, t, ok);
        // The slack on the right absorbs rounding in f, which grows with t.
        if (ok && f1 <= f0 - 0.25 * alpha * decrement + 1e-14 * std::abs(f0)) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        if (decrement <= 1e-6) break;
        throw ConvergenceError("solve_geometric_mean: line search failed", residual);
      }
      const Vector moved = alpha * step;
      y += moved;
      if (++steps > options.max_newton_steps)
        throw ConvergenceError("solve_geometric_mean: Newton step budget exhausted", residual);
      if (decrement <= 1e-8 && moved.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + y.cwiseAbs().maxCoeff())) break;
      if (inner > 200) throw ConvergenceError("solve_geometric_mean: centering did not converge", residual);
    }
    sol.objective_history.push_back(scal(y).array().log().sum());
    if (num_terms / t < options.gap_tolerance) break;
    t *= options.barrier_growth;
  }

  sol.status = ScalingStatus::optimal;
  sol.variables = red->z0 + red->basis * y;
  sol.center = sol.variables.segment(program.center_offset(), program.dim());
  sol.scalings = sol.variables.segment(program.scaling_offset(), program.num_scalings());
  sol.log_objective = sol.scalings.array().log().sum();
  sol.kkt_residual = std::max(residual, 1.0 / t);
  sol.newton_steps = steps;
  return sol;
}

std::optional<SlackPoint> max_slack_point(const ScalingProgram& program, const Vector& scalings) {
  if (scalings.size() != program.num_scalings()) throw std::invalid_argument("max_slack_point: scaling count mismatch");
  ScalingProgram pinned = program;
  for (Index k = 0; k < program.num_scalings(); ++k) {
    Vector row = Vector::Zero(program.num_variables());
    row(program.scaling_offset() + k) = 1.0;
    pinned.add_equality(row, scalings(k));
  }
  const auto red = reduce(pinned, false);
  if (!red) return std::nullopt;
  // A large cap keeps the LP bounded; the slack value itself is only compared with zero.
  const auto best = phase_one(*red, 1e6);
  if (!best) return std::nullopt;
  SlackPoint out;
  out.variables = red->z0 + red->basis * best->y;
  out.slack = best->slack;
  return out;
}

}  // namespace maskrl
