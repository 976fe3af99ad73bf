#include <maskrl/convex/linear_program.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace maskrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-10;
constexpr int kDegenerateRunBeforeBland = 50;

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// How an original variable is expressed through nonnegative standard-form
// columns: x = offset + sign * z[col] (- z[col2] for free variables).
struct VariableMap {
  double offset = 0.0;
  double sign = 1.0;
  Index col = -1;
  Index col2 = -1;
};

class Simplex {
 public:
  Simplex(Tableau tableau, std::vector<Index> basis, Index num_structural, Index num_artificial)
      : t_(std::move(tableau)),
        basis_(std::move(basis)),
        num_structural_(num_structural),
        num_artificial_(num_artificial) {}

  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  Index first_artificial() const { return cols() - num_artificial_; }

  void set_phase_one_objective() {
    t_.row(rows()).setZero();
    for (Index i = 0; i < rows(); ++i) {
      if (basis_[i] >= first_artificial()) t_.row(rows()) -= t_.row(i);
    }
    for (Index j = first_artificial(); j < cols(); ++j) t_(rows(), j) = 0.0;
  }

  void set_phase_two_objective(const Vector& cost) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(cost.size()) = cost.transpose();
    for (Index i = 0; i < rows(); ++i) {
      const Index b = basis_[i];
      const double cb = b < cost.size() ? cost(b) : 0.0;
      if (cb != 0.0) t_.row(rows()) -= cb * t_.row(i);
    }
  }

  // Returns false when the objective is unbounded below.
  bool run(bool allow_artificial, int& iterations, int max_iterations) {
    int degenerate_run = 0;
    bool bland = false;
    const Index limit = allow_artificial ? cols() : first_artificial();
    while (true) {
      if (iterations >= max_iterations) throw LpError("simplex: iteration limit reached");
      Index enter = -1;
      double best = -kCostTol;
      for (Index j = 0; j < limit; ++j) {
        const double d = t_(rows(), j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      double best_ratio = kInf;
      for (Index i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(i, cols()) / a;
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          best_ratio = std::min(ratio, best_ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;

      degenerate_run = best_ratio <= 1e-13 ? degenerate_run + 1 : 0;
      if (degenerate_run > kDegenerateRunBeforeBland) bland = true;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(Index row, Index col) {
    const double p = t_(row, col);
    t_.row(row) /= p;
    for (Index i = 0; i <= rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Pivots zero-level artificials out of the basis where possible.
  void expel_artificials() {
    for (Index i = 0; i < rows(); ++i) {
      if (basis_[i] < first_artificial()) continue;
      Index best = -1;
      double mag = 1e-9;
      for (Index j = 0; j < first_artificial(); ++j) {
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  double objective_value() const { return -t_(rows(), cols()); }

  Vector structural_solution() const {
    Vector z = Vector::Zero(num_structural_);
    for (Index i = 0; i < rows(); ++i) {
      if (basis_[i] < num_structural_) z(basis_[i]) = t_(i, cols());
    }
    return z;
  }

  const std::vector<Index>& basis() const { return basis_; }

 private:
  Tableau t_;
  std::vector<Index> basis_;
  Index num_structural_;
  Index num_artificial_;
};

}  // namespace

LinearProgram::LinearProgram(Index num_variables)
    : objective(Vector::Zero(num_variables)),
      eq_matrix(0, num_variables),
      eq_rhs(0),
      ineq_matrix(0, num_variables),
      ineq_rhs(0),
      lower(Vector::Constant(num_variables, -kInf)),
      upper(Vector::Constant(num_variables, kInf)) {}

void LinearProgram::add_equality(const Vector& row, double rhs) {
  if (row.size() != num_variables()) throw std::invalid_argument("LinearProgram: row width mismatch");
  eq_matrix.conservativeResize(eq_matrix.rows() + 1, num_variables());
  eq_matrix.row(eq_matrix.rows() - 1) = row.transpose();
  eq_rhs.conservativeResize(eq_rhs.size() + 1);
  eq_rhs(eq_rhs.size() - 1) = rhs;
}

void LinearProgram::add_inequality(const Vector& row, double rhs) {
  if (row.size() != num_variables()) throw std::invalid_argument("LinearProgram: row width mismatch");
  ineq_matrix.conservativeResize(ineq_matrix.rows() + 1, num_variables());
  ineq_matrix.row(ineq_matrix.rows() - 1) = row.transpose();
  ineq_rhs.conservativeResize(ineq_rhs.size() + 1);
  ineq_rhs(ineq_rhs.size() - 1) = rhs;
}

void LinearProgram::validate() const {
  const Index n = num_variables();
  if (eq_matrix.cols() != n || ineq_matrix.cols() != n)
    throw std::invalid_argument("LinearProgram: constraint matrix width differs from objective");
  if (eq_matrix.rows() != eq_rhs.size() || ineq_matrix.rows() != ineq_rhs.size())
    throw std::invalid_argument("LinearProgram: constraint rows differ from right-hand side");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("LinearProgram: bound vectors have the wrong size");
  if (!objective.allFinite() || !eq_matrix.allFinite() || !eq_rhs.allFinite() ||
      !ineq_matrix.allFinite() || !ineq_rhs.allFinite())
    throw std::invalid_argument("LinearProgram: non-finite data");
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInf || upper(j) == -kInf)
      throw std::invalid_argument("LinearProgram: invalid bound");
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

double lp_violation(const LinearProgram& lp, const Vector& x) {
  double worst = 0.0;
  if (lp.eq_matrix.rows() > 0)
    worst = std::max(worst, (lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff());
  if (lp.ineq_matrix.rows() > 0)
    worst = std::max(worst, (lp.ineq_matrix * x - lp.ineq_rhs).maxCoeff());
  for (Index j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lp.lower(j) - x(j));
    worst = std::max(worst, x(j) - lp.upper(j));
  }
  return worst;
}

LpResult solve_lp(const LinearProgram& lp) {
  lp.validate();
  const Index n = lp.num_variables();

  // Map original variables to nonnegative columns.
  std::vector<VariableMap> vars(static_cast<size_t>(n));
  Index nz = 0;
  std::vector<std::pair<Index, double>> bound_rows;  // (column, range)
  for (Index j = 0; j < n; ++j) {
    auto& v = vars[static_cast<size_t>(j)];
    const double lo = lp.lower(j);
    const double hi = lp.upper(j);
    if (std::isfinite(lo)) {
      if (hi < lo) {
        LpResult r;
        r.status = LpStatus::infeasible;
        return r;
      }
      v.offset = lo;
      v.col = nz++;
      if (std::isfinite(hi)) bound_rows.emplace_back(v.col, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      v.col = nz++;
    } else {
      v.col = nz++;
      v.col2 = nz++;
    }
  }

  const Index m_eq = lp.eq_matrix.rows();
  const Index m_in = lp.ineq_matrix.rows();
  const Index m_bd = static_cast<Index>(bound_rows.size());
  const Index m = m_eq + m_in + m_bd;
  const Index num_slack = m_in + m_bd;

  Vector offset(n);
  for (Index j = 0; j < n; ++j) offset(j) = vars[static_cast<size_t>(j)].offset;

  auto transform = [&](const Matrix& a, Matrix& out) {
    out.setZero(a.rows(), nz);
    for (Index j = 0; j < n; ++j) {
      const auto& v = vars[static_cast<size_t>(j)];
      out.col(v.col) += v.sign * a.col(j);
      if (v.col2 >= 0) out.col(v.col2) -= a.col(j);
    }
  };

  Matrix a_std(m, nz + num_slack);
  a_std.setZero();
  Vector rhs(m);
  Matrix block;
  if (m_eq > 0) {
    transform(lp.eq_matrix, block);
    a_std.block(0, 0, m_eq, nz) = block;
    rhs.head(m_eq) = lp.eq_rhs - lp.eq_matrix * offset;
  }
  if (m_in > 0) {
    transform(lp.ineq_matrix, block);
    a_std.block(m_eq, 0, m_in, nz) = block;
    rhs.segment(m_eq, m_in) = lp.ineq_rhs - lp.ineq_matrix * offset;
    for (Index i = 0; i < m_in; ++i) a_std(m_eq + i, nz + i) = 1.0;
  }
  for (Index k = 0; k < m_bd; ++k) {
    const Index row = m_eq + m_in + k;
    a_std(row, bound_rows[static_cast<size_t>(k)].first) = 1.0;
    a_std(row, nz + m_in + k) = 1.0;
    rhs(row) = bound_rows[static_cast<size_t>(k)].second;
  }

  // Nonnegative right-hand side; rows whose slack survives with +1 start basic.
  std::vector<Index> basis(static_cast<size_t>(m), -1);
  Index num_art = 0;
  for (Index i = 0; i < m; ++i) {
    if (rhs(i) < 0.0) {
      rhs(i) = -rhs(i);
      a_std.row(i) *= -1.0;
    }
    if (i >= m_eq && a_std(i, nz + (i - m_eq)) > 0.0) {
      basis[static_cast<size_t>(i)] = nz + (i - m_eq);
    } else {
      ++num_art;
    }
  }

  const Index structural = nz + num_slack;
  const Index cols = structural + num_art;
  Tableau t = Tableau::Zero(m + 1, cols + 1);
  t.block(0, 0, m, structural) = a_std;
  t.block(0, cols, m, 1) = rhs;
  Index art = structural;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] < 0) {
      t(i, art) = 1.0;
      basis[static_cast<size_t>(i)] = art++;
    }
  }

  Simplex simplex(std::move(t), std::move(basis), structural, num_art);
  LpResult result;
  const int max_iterations = static_cast<int>(50 * (m + cols) + 1000);

  if (num_art > 0) {
    simplex.set_phase_one_objective();
    simplex.run(true, result.iterations, max_iterations);
    const double scale = std::max(1.0, rhs.size() > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);
    if (simplex.objective_value() > 1e-9 * scale) {
      result.status = LpStatus::infeasible;
      return result;
    }
    simplex.expel_artificials();
  }

  Vector cost = Vector::Zero(structural);
  {
    Matrix obj_row(1, n);
    obj_row.row(0) = lp.objective.transpose();
    transform(obj_row, block);
    cost.head(nz) = block.row(0).transpose();
  }
  simplex.set_phase_two_objective(cost);
  if (!simplex.run(false, result.iterations, max_iterations)) {
    result.status = LpStatus::unbounded;
    return result;
  }

  // Recompute the basic solution from the original columns to shed the
  // round-off accumulated in the tableau.
  Vector z = simplex.structural_solution();
  {
    std::vector<Index> rows_used;
    std::vector<Index> cols_used;
    for (Index i = 0; i < m; ++i) {
      const Index b = simplex.basis()[static_cast<size_t>(i)];
      if (b < structural) cols_used.push_back(b);
    }
    if (!cols_used.empty()) {
      Matrix basis_cols(m, static_cast<Index>(cols_used.size()));
      for (size_t k = 0; k < cols_used.size(); ++k) basis_cols.col(static_cast<Index>(k)) = a_std.col(cols_used[k]);
      Vector zb = basis_cols.colPivHouseholderQr().solve(rhs);
      if (zb.allFinite() && (basis_cols * zb - rhs).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()) &&
          zb.minCoeff() > -1e-9) {
        Vector refined = Vector::Zero(structural);
        for (size_t k = 0; k < cols_used.size(); ++k) refined(cols_used[k]) = std::max(0.0, zb(static_cast<Index>(k)));
        z = refined;
      }
    }
  }

  result.x.resize(n);
  for (Index j = 0; j < n; ++j) {
    const auto& v = vars[static_cast<size_t>(j)];
    double value = v.offset + v.sign * z(v.col);
    if (v.col2 >= 0) value -= z(v.col2);
    result.x(j) = value;
  }
  result.objective = lp.objective.dot(result.x);
  result.status = LpStatus::optimal;
  return result;
}

}  // namespace maskrl
