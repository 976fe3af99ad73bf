#pragma once

#include <maskrl/types.hpp>

#include <nlohmann/json_fwd.hpp>

namespace maskrl {

/// Default residual tolerance for membership and boundary queries.
inline constexpr double kMembershipTol = 1e-8;

/// Axis-aligned box [lower, upper].
class IntervalBox {
 public:
  IntervalBox() = default;
  IntervalBox(Vector lower, Vector upper);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Index dim() const { return lower_.size(); }

  Vector center() const { return 0.5 * (lower_ + upper_); }
  Vector radius() const { return 0.5 * (upper_ - lower_); }
  double volume() const { return (upper_ - lower_).prod(); }

  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clamp(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Halfspace {x : normalᵀx <= offset}.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Vector n, double b);
};

/// Zonotope ⟨c, G⟩ = {c + Gβ : ‖β‖∞ <= 1}.
///
/// A generator matrix with zero columns denotes the single point {c}. Zero
/// generator columns are kept as they are; nothing is pruned.
class Zonotope {
 public:
  Zonotope() = default;
  Zonotope(Vector center, Matrix generators);

  static Zonotope point(Vector center);
  static Zonotope from_box(const IntervalBox& box);

  const Vector& center() const { return center_; }
  const Matrix& generators() const { return generators_; }
  Index dim() const { return center_.size(); }
  Index num_generators() const { return generators_.cols(); }

 private:
  Vector center_;
  Matrix generators_;
};

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope linear_map(const Matrix& m, const Zonotope& z);
Zonotope translate(const Zonotope& z, const Vector& offset);

/// ρ_Z(l) = lᵀc + Σ|lᵀgᵢ|.
double support_function(const Zonotope& z, const Vector& direction);

/// Tightest axis-aligned box around z.
IntervalBox interval_hull(const Zonotope& z);

/// True iff x = c + Gγ has a solution with ‖γ‖∞ <= 1 + tol. Decided by a
/// linear program; a solver breakdown raises LpError rather than returning false.
bool contains_point(const Zonotope& z, const Vector& x, double tol = kMembershipTol);

struct BoundaryPoint {
  Vector point;
  double alpha = 0.0;  ///< in units of the supplied direction
};

/// Farthest point x + αd (α >= 0) that still lies in z. x must be inside z.
BoundaryPoint boundary_point(const Zonotope& z, const Vector& x, const Vector& direction);

/// Origin-centered zonotope with `num_generators` generators that lies inside
/// the Euclidean ball of the given radius and touches its boundary.
Zonotope ball_underapprox(int dim, int num_generators, double radius);

void to_json(nlohmann::json& j, const Zonotope& z);
void from_json(const nlohmann::json& j, Zonotope& z);

}  // namespace maskrl
