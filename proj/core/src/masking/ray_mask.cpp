#include <maskrl/masking/ray_mask.hpp>

#include <stdexcept>

namespace maskrl {

namespace {

void check_center(const Zonotope& relevant, const IntervalBox& actions) {
  if (relevant.dim() != actions.dim()) throw std::invalid_argument("ray mask: dimension mismatch");
  const Vector& c = relevant.center();
  const Vector margin = 1e-12 * (1.0 + actions.radius().array()).matrix();
  if (((c - actions.lower()).array() <= margin.array()).any() || ((actions.upper() - c).array() <= margin.array()).any())
    throw std::domain_error("ray mask: center of the relevant set is not interior to the action set");
}

}  // namespace

RayMapResult ray_map(const Vector& a, const Zonotope& relevant, const IntervalBox& actions) {
  check_center(relevant, actions);
  if (!actions.contains(a, kMembershipTol)) throw std::invalid_argument("ray_map: action outside the action set");
  const Vector& c = relevant.center();
  const Vector d = a - c;
  if (!(d.cwiseAbs().maxCoeff() > 0.0)) return {c, 1.0};
  const double alpha_a = boundary_point(Zonotope::from_box(actions), c, d).alpha;
  const double alpha_r = boundary_point(relevant, c, d).alpha;
  const double ratio = alpha_r / alpha_a;
  return {c + ratio * d, ratio};
}

Vector ray_unmap(const Vector& ar, const Zonotope& relevant, const IntervalBox& actions) {
  check_center(relevant, actions);
  const Vector& c = relevant.center();
  const Vector d = ar - c;
  if (!(d.cwiseAbs().maxCoeff() > 0.0)) return c;
  const double alpha_a = boundary_point(Zonotope::from_box(actions), c, d).alpha;
  const double alpha_r = boundary_point(relevant, c, d).alpha;
  if (!(alpha_r > 0.0)) throw std::domain_error("ray_unmap: relevant set is degenerate along this ray");
  return c + (alpha_a / alpha_r) * d;
}

}  // namespace maskrl
