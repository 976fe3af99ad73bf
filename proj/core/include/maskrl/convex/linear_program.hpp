#pragma once

#include <maskrl/types.hpp>

#include <stdexcept>
#include <string>

namespace maskrl {

/// Dense linear program
///
///   minimize    objectiveᵀ x
///   subject to  eq_matrix x   = eq_rhs
///               ineq_matrix x <= ineq_rhs
///               lower <= x <= upper
///
/// Bounds default to (-inf, +inf) when left empty.
struct LinearProgram {
  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix ineq_matrix;
  Vector ineq_rhs;
  Vector lower;
  Vector upper;

  explicit LinearProgram(Index num_variables = 0);

  Index num_variables() const { return objective.size(); }

  void add_equality(const Vector& row, double rhs);
  void add_inequality(const Vector& row, double rhs);

  /// Throws std::invalid_argument on inconsistent shapes or non-finite data.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::optimal; }
};

/// Raised when the simplex cannot finish (iteration cap, numerical breakdown).
/// Infeasible and unbounded programs are reported through LpStatus instead.
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-phase dense simplex. Pricing is Dantzig with a switch to Bland's rule
/// after a run of degenerate pivots, so results are deterministic and the
/// method cannot cycle.
LpResult solve_lp(const LinearProgram& lp);

/// Largest absolute constraint violation of x (equalities, inequalities, bounds).
double lp_violation(const LinearProgram& lp, const Vector& x);

}  // namespace maskrl
