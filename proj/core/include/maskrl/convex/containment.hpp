#pragma once

#include <maskrl/geometry/zonotope.hpp>

#include <optional>

namespace maskrl {

/// Witness for inner ⊆ outer:
///   G_inner = G_outer Γ,  c_outer - c_inner = G_outer β,  ‖[Γ, β]‖∞ <= 1
/// where ‖·‖∞ is the induced (maximum absolute row sum) norm.
struct ContainmentCertificate {
  Matrix gamma;
  Vector beta;
};

struct ContainmentResult {
  bool certified = false;
  /// min over certificates of ‖[Γ, β]‖∞; +inf when the equalities have no solution.
  double norm = 0.0;
  std::optional<ContainmentCertificate> certificate;
};

/// Sufficient test only: a negative answer does not prove non-containment.
/// Solver breakdown raises LpError.
ContainmentResult zonotope_containment(const Zonotope& inner, const Zonotope& outer);

/// Largest residual of the three certificate conditions.
double certificate_residual(const Zonotope& inner, const Zonotope& outer, const ContainmentCertificate& cert);

}  // namespace maskrl
