#pragma once

#include <maskrl/geometry/zonotope.hpp>

namespace maskrl {

/// Radial map from the action box A onto A^r through the center c of A^r:
///   a^r = c + (λ_{A^r}(a) / λ_A(a)) · (a - c)
/// where λ_X(a) is the distance from c to the boundary of X along a - c.
/// Both distances come from the same boundary-point program, so A^r = A maps
/// every action to itself bit for bit.
struct RayMapResult {
  Vector point;
  double ratio = 1.0;
};

/// Throws std::invalid_argument if a ∉ A and std::domain_error if c is not
/// interior to A.
RayMapResult ray_map(const Vector& a, const Zonotope& relevant, const IntervalBox& actions);

/// Inverse of ray_map. Requires a non-degenerate A^r along the ray.
Vector ray_unmap(const Vector& ar, const Zonotope& relevant, const IntervalBox& actions);

}  // namespace maskrl
