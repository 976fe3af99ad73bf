#include <maskrl/geometry/zonotope.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace maskrl {

namespace {

// Unit directions, one per antipodal pair. In the plane they are equally
// spaced over a half turn; in higher dimensions they are taken from the
// lattice directions {±1, 0}ᴺ ordered by support size (axes, then pair
// diagonals, ...), padded with seeded random directions if P is larger.
Matrix spread_directions(int dim, int count) {
  Matrix u(dim, count);
  if (dim == 1) {
    u.setOnes();
    return u;
  }
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double angle = std::numbers::pi * i / count;
      u(0, i) = std::cos(angle);
      u(1, i) = std::sin(angle);
    }
    return u;
  }
  int filled = 0;
  for (int support = 1; support <= dim && filled < count; ++support) {
    std::vector<int> idx(static_cast<size_t>(support));
    for (int i = 0; i < support; ++i) idx[static_cast<size_t>(i)] = i;
    while (filled < count) {
      // leading coordinate fixed to +1 collapses antipodes
      const int sign_patterns = 1 << (support - 1);
      for (int mask = 0; mask < sign_patterns && filled < count; ++mask) {
        Vector d = Vector::Zero(dim);
        d(idx[0]) = 1.0;
        for (int k = 1; k < support; ++k) d(idx[static_cast<size_t>(k)]) = (mask >> (k - 1)) & 1 ? -1.0 : 1.0;
        u.col(filled++) = d.normalized();
      }
      // next combination
      int k = support - 1;
      while (k >= 0 && idx[static_cast<size_t>(k)] == dim - support + k) --k;
      if (k < 0) break;
      ++idx[static_cast<size_t>(k)];
      for (int r = k + 1; r < support; ++r) idx[static_cast<size_t>(r)] = idx[static_cast<size_t>(r - 1)] + 1;
    }
  }
  Rng rng(0x5eed5eedULL);
  std::normal_distribution<double> normal;
  while (filled < count) {
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = normal(rng);
    u.col(filled++) = d.normalized();
  }
  return u;
}

// max over unit l of Σ|lᵀuᵢ| = max over sign vectors σ of ‖Uσ‖.
double max_vertex_norm(const Matrix& u) {
  const Index dim = u.rows();
  const Index count = u.cols();
  double best = 0.0;
  auto from_direction = [&](const Vector& l) {
    Vector sigma = (u.transpose() * l).unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    return Vector(u * sigma);
  };

  if (dim == 2) {
    // Sign patterns are constant between consecutive breakpoints, so one
    // probe per arc visits every vertex.
    std::vector<double> breaks;
    for (Index i = 0; i < count; ++i) {
      const double a = std::atan2(u(1, i), u(0, i));
      breaks.push_back(std::remainder(a + std::numbers::pi / 2, 2 * std::numbers::pi));
      breaks.push_back(std::remainder(a - std::numbers::pi / 2, 2 * std::numbers::pi));
    }
    std::sort(breaks.begin(), breaks.end());
    for (size_t k = 0; k < breaks.size(); ++k) {
      const double lo = breaks[k];
      const double hi = k + 1 < breaks.size() ? breaks[k + 1] : breaks[0] + 2 * std::numbers::pi;
      const double mid = 0.5 * (lo + hi);
      best = std::max(best, from_direction(Vector{{std::cos(mid), std::sin(mid)}}).norm());
    }
    return best;
  }

  if (count <= 22) {
    const std::uint64_t patterns = std::uint64_t{1} << (count - 1);
    Vector sigma(count);
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      sigma(0) = 1.0;
      for (Index i = 1; i < count; ++i) sigma(i) = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      best = std::max(best, (u * sigma).norm());
    }
    return best;
  }

  // Fixed-point ascent l -> Uσ(l) from many starts.
  Rng rng(0xba11ULL);
  std::normal_distribution<double> normal;
  auto ascend = [&](Vector l) {
    double value = 0.0;
    for (int it = 0; it < 200; ++it) {
      Vector v = from_direction(l);
      const double nv = v.norm();
      if (nv <= value * (1.0 + 1e-15)) break;
      value = nv;
      l = v / nv;
    }
    best = std::max(best, value);
  };
  for (Index i = 0; i < count; ++i) ascend(u.col(i));
  for (Index i = 0; i < dim; ++i) ascend(Vector::Unit(dim, i));
  for (int s = 0; s < 8192; ++s) {
    Vector l(dim);
    for (Index i = 0; i < dim; ++i) l(i) = normal(rng);
    ascend(l.normalized());
  }
  return best;
}

}  // namespace

Zonotope ball_underapprox(int dim, int num_generators, double radius) {
  if (dim < 1) throw std::invalid_argument("ball_underapprox: dimension must be positive");
  if (num_generators < dim) throw std::invalid_argument("ball_underapprox: need at least as many generators as dimensions");
  if (!(radius > 0.0)) throw std::invalid_argument("ball_underapprox: radius must be positive");
  const Matrix u = spread_directions(dim, num_generators);
  const double rho = max_vertex_norm(u);
  return Zonotope(Vector::Zero(dim), (radius / rho) * u);
}

}  // namespace maskrl
