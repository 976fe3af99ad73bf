#pragma once

#include <maskrl/geometry/zonotope.hpp>

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace maskrl {

/// A zonotope whose center and generators are affine in the decision
/// variables of a ScalingProgram:
///   center     = offset + center_map · c
///   generators = [fixed_generators, scaled_generators · diag(p̃)]
struct AffineZonotope {
  Vector offset;
  Matrix center_map;
  Matrix fixed_generators;
  Matrix scaled_generators;

  Index dim() const { return offset.size(); }
  Zonotope evaluate(const Vector& center, const Vector& scalings) const;
};

/// Template-zonotope sizing problem
///
///   maximize   Σ log p̃ᵢ
///   subject to linear constraints in z = [c (N) | p̃ (P) | auxiliaries]
///              p̃ᵢ >= floor
///
/// The relevant set is ⟨c, G̃ diag(p̃)⟩. Maximizing Σ log p̃ is the same as
/// maximizing the geometric mean (Π p̃ᵢ)^(1/P).
class ScalingProgram {
 public:
  explicit ScalingProgram(Matrix template_generators, double positivity_floor = 1e-6);

  const Matrix& template_generators() const { return template_; }
  Index dim() const { return template_.rows(); }
  Index num_scalings() const { return template_.cols(); }
  Index num_aux() const { return num_aux_; }
  Index num_variables() const { return dim() + num_scalings() + num_aux_; }
  Index center_offset() const { return 0; }
  Index scaling_offset() const { return dim(); }
  Index aux_offset() const { return dim() + num_scalings(); }
  double positivity_floor() const { return floor_; }

  /// Pins the center instead of leaving it free.
  void fix_center(const Vector& center);

  /// Appends `count` auxiliary variables and returns the index of the first.
  Index add_aux(Index count);

  void add_inequality(const Vector& row, double rhs);
  void add_equality(const Vector& row, double rhs);

  const Matrix& ineq_matrix() const { return ineq_; }
  const Vector& ineq_rhs() const { return ineq_rhs_; }
  const Matrix& eq_matrix() const { return eq_; }
  const Vector& eq_rhs() const { return eq_rhs_; }

  /// ⟨c, G̃ diag(p̃)⟩ as an affine zonotope in the program's variables.
  AffineZonotope relevant_set() const;

  /// Row-permuted copy, for invariance checks.
  ScalingProgram permuted(const std::vector<Index>& ineq_order) const;

  nlohmann::json to_json() const;

 private:
  Matrix template_;
  double floor_;
  Index num_aux_ = 0;
  Matrix ineq_;
  Vector ineq_rhs_;
  Matrix eq_;
  Vector eq_rhs_;
};

/// inner ⊆ outer through the containment certificate. When the outer
/// generator matrix is square and invertible the certificate is unique and
/// reduces to two inequalities per row; otherwise Γ and β become auxiliary
/// variables and ‖[Γ, β]‖∞ <= 1 is linearized with absolute-value bounds.
void add_containment(ScalingProgram& program, const AffineZonotope& inner, const Zonotope& outer);

/// ρ_inner(direction) <= bound.
void add_support_bound(ScalingProgram& program, const AffineZonotope& inner, const Vector& direction, double bound);

struct BarrierOptions {
  double gap_tolerance = 1e-7;
  double barrier_growth = 10.0;
  int max_newton_steps = 3000;
};

enum class ScalingStatus { optimal, infeasible };

struct ScalingSolution {
  ScalingStatus status = ScalingStatus::infeasible;
  Vector variables;
  Vector center;
  Vector scalings;
  double log_objective = 0.0;
  double kkt_residual = 0.0;
  int newton_steps = 0;
  /// Σ log p̃ after each centering step of the barrier path.
  std::vector<double> objective_history;

  bool optimal() const { return status == ScalingStatus::optimal; }
  double geometric_mean() const;
  Zonotope zonotope(const Matrix& template_generators) const;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Log-barrier Newton method with an LP phase one for a strictly feasible
/// start. Infeasibility (no point with strictly positive slack) is reported
/// through the status; failing to converge throws ConvergenceError.
ScalingSolution solve_geometric_mean(const ScalingProgram& program, const BarrierOptions& options = {});

struct SlackPoint {
  Vector variables;
  double slack = 0.0;
};

/// Maximizes the common slack of all inequalities with the scalings pinned to
/// `scalings` (the positivity floor is dropped). Used to place a fallback set.
/// Returns nullopt when even the equalities cannot be met.
std::optional<SlackPoint> max_slack_point(const ScalingProgram& program, const Vector& scalings);

}  // namespace maskrl
