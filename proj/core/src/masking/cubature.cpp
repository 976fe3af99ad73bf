#include <maskrl/masking/cubature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <queue>

namespace maskrl {

namespace {

bool next_combination(std::vector<Index>& idx, Index n) {
  const Index k = static_cast<Index>(idx.size());
  Index i = k - 1;
  while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<size_t>(i)];
  for (Index j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

std::vector<Parallelotope> zonotope_tiling(const Zonotope& z) {
  const Index n = z.dim();
  const Index p = z.num_generators();
  std::vector<Parallelotope> tiles;
  if (n == 0 || p < n) return tiles;
  const Matrix& g = z.generators();
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  const double det_tol = 1e-12 * std::pow(scale, static_cast<double>(n));

  Rng rng(0x711e5ULL);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  for (int attempt = 0; attempt < 16; ++attempt) {
    tiles.clear();
    Vector h(p);
    for (Index j = 0; j < p; ++j) h(j) = unit(rng) * (1.0 + g.col(j).squaredNorm());
    bool generic = true;
    std::vector<Index> idx(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    do {
      Matrix gs(n, n);
      Vector hs(n);
      for (Index i = 0; i < n; ++i) {
        gs.col(i) = g.col(idx[static_cast<size_t>(i)]);
        hs(i) = h(idx[static_cast<size_t>(i)]);
      }
      Eigen::PartialPivLU<Matrix> lu(gs);
      if (!(std::abs(lu.determinant()) > det_tol)) continue;
      const Vector u = gs.transpose().partialPivLu().solve(hs);
      Vector center = z.center();
      size_t next = 0;
      for (Index j = 0; j < p; ++j) {
        if (next < idx.size() && idx[next] == j) {
          ++next;
          continue;
        }
        const double gap = h(j) - u.dot(g.col(j));
        if (std::abs(gap) < 1e-9 * (1.0 + std::abs(h(j))) && g.col(j).squaredNorm() > 0.0) {
          generic = false;
          break;
        }
        center += (gap > 0.0 ? 1.0 : -1.0) * g.col(j);
      }
      if (!generic) break;
      tiles.push_back({std::move(center), std::move(gs)});
    } while (next_combination(idx, p));
    if (generic) return tiles;
  }
  throw std::runtime_error("zonotope_tiling: could not find generic lifting heights");
}

namespace {

struct Region {
  size_t tile = 0;
  Vector center;
  Vector half;
  double value = 0.0;
  double error = 0.0;
  int split_axis = 0;
};

struct ByError {
  bool operator()(const Region& a, const Region& b) const { return a.error < b.error; }
};

class Rule {
 public:
  virtual ~Rule() = default;
  virtual void apply(const std::function<double(const Vector&)>& f, Region& r, int& evals) const = 0;
};

class GenzMalik final : public Rule {
 public:
  explicit GenzMalik(Index n) : n_(n) {
    const double dn = static_cast<double>(n);
    w7_ = {(12824.0 - 9120.0 * dn + 400.0 * dn * dn) / 19683.0, 980.0 / 6561.0, (1820.0 - 400.0 * dn) / 19683.0,
           200.0 / 19683.0, 6859.0 / 19683.0 / std::ldexp(1.0, static_cast<int>(n))};
    w5_ = {(729.0 - 950.0 * dn + 50.0 * dn * dn) / 729.0, 245.0 / 486.0, (265.0 - 100.0 * dn) / 1458.0, 25.0 / 729.0};
  }

  void apply(const std::function<double(const Vector&)>& f, Region& r, int& evals) const override {
    const double l2 = std::sqrt(9.0 / 70.0);
    const double l3 = std::sqrt(9.0 / 10.0);
    const double l4 = std::sqrt(9.0 / 10.0);
    const double l5 = std::sqrt(9.0 / 19.0);
    const Vector& c = r.center;
    const Vector& h = r.half;
    const double f0 = f(c);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, s5 = 0.0;
    double best_diff = -1.0;
    r.split_axis = 0;
    Vector x = c;
    for (Index i = 0; i < n_; ++i) {
      x(i) = c(i) - l2 * h(i);
      const double a = f(x);
      x(i) = c(i) + l2 * h(i);
      const double b = f(x);
      x(i) = c(i) - l3 * h(i);
      const double a3 = f(x);
      x(i) = c(i) + l3 * h(i);
      const double b3 = f(x);
      x(i) = c(i);
      s2 += a + b;
      s3 += a3 + b3;
      const double diff = std::abs(a + b - 2.0 * f0 - (l2 * l2 / (l3 * l3)) * (a3 + b3 - 2.0 * f0));
      if (diff > best_diff * (1.0 + 1e-12)) {
        best_diff = diff;
        r.split_axis = static_cast<int>(i);
      }
    }
    for (Index i = 0; i < n_; ++i) {
      for (Index j = i + 1; j < n_; ++j) {
        for (double si : {-1.0, 1.0}) {
          for (double sj : {-1.0, 1.0}) {
            x(i) = c(i) + si * l4 * h(i);
            x(j) = c(j) + sj * l4 * h(j);
            s4 += f(x);
          }
        }
        x(i) = c(i);
        x(j) = c(j);
      }
    }
    const std::uint64_t corners = std::uint64_t{1} << n_;
    for (std::uint64_t mask = 0; mask < corners; ++mask) {
      for (Index i = 0; i < n_; ++i) x(i) = c(i) + ((mask >> i) & 1 ? l5 : -l5) * h(i);
      s5 += f(x);
    }
    evals += static_cast<int>(1 + 4 * n_ + 2 * n_ * (n_ - 1) + static_cast<Index>(corners));
    const double vol = std::ldexp(h.prod(), static_cast<int>(n_));
    const double i7 = vol * (w7_[0] * f0 + w7_[1] * s2 + w7_[2] * s3 + w7_[3] * s4 + w7_[4] * s5);
    const double i5 = vol * (w5_[0] * f0 + w5_[1] * s2 + w5_[2] * s3 + w5_[3] * s4);
    r.value = i7;
    r.error = std::abs(i7 - i5);
  }

 private:
  Index n_;
  std::array<double, 5> w7_{};
  std::array<double, 4> w5_{};
};

class GaussKronrod15 final : public Rule {
 public:
  void apply(const std::function<double(const Vector&)>& f, Region& r, int& evals) const override {
    static constexpr double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                                     0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                                     0.207784955007898468, 0.000000000000000000};
    static constexpr double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                                     0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                                     0.204432940075298892, 0.209482141084727828};
    static constexpr double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                                     0.417959183673469388};
    const double c = r.center(0);
    const double h = r.half(0);
    Vector x(1);
    x(0) = c;
    const double fc = f(x);
    double k = wk[7] * fc;
    double gsum = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      x(0) = c - h * xk[j];
      const double a = f(x);
      x(0) = c + h * xk[j];
      const double b = f(x);
      k += wk[j] * (a + b);
      if (j % 2 == 1) gsum += wg[j / 2] * (a + b);
    }
    evals += 15;
    r.value = k * h;
    r.error = std::abs((k - gsum) * h);
    r.split_axis = 0;
  }
};

}  // namespace

CubatureResult cubature_integral(const LogDensity& log_density, const Zonotope& z, const CubatureOptions& options) {
  CubatureResult out;
  const Index n = z.dim();
  if (n == 0) throw std::invalid_argument("cubature_integral: zero-dimensional set");
  const std::vector<Parallelotope> tiles = zonotope_tiling(z);
  if (static_cast<int>(tiles.size()) > options.max_tiles)
    throw CubatureError("cubature_integral: too many tiles", 0.0, std::numeric_limits<double>::infinity());
  if (tiles.empty()) return out;

  std::vector<double> jac(tiles.size());
  for (size_t t = 0; t < tiles.size(); ++t) jac[t] = std::abs(tiles[t].generators.determinant());

  std::unique_ptr<Rule> rule;
  if (n == 1)
    rule = std::make_unique<GaussKronrod15>();
  else
    rule = std::make_unique<GenzMalik>(n);

  auto integrand_for = [&](size_t t) {
    return [&, t](const Vector& y) {
      const double v = log_density ? std::exp(log_density(tiles[t].center + tiles[t].generators * y)) : 1.0;
      return v * jac[t];
    };
  };

  std::priority_queue<Region, std::vector<Region>, ByError> queue;
  double total = 0.0;
  double total_err = 0.0;
  for (size_t t = 0; t < tiles.size(); ++t) {
    Region r{t, Vector::Zero(n), Vector::Ones(n)};
    rule->apply(integrand_for(t), r, out.evaluations);
    total += r.value;
    total_err += r.error;
    queue.push(std::move(r));
  }
  out.regions = static_cast<int>(queue.size());

  while (total_err > std::max(options.rel_tol * std::abs(total), options.abs_tol)) {
    if (out.regions >= options.max_regions)
      throw CubatureError("cubature_integral: subdivision limit reached", total, total_err);
    Region r = queue.top();
    queue.pop();
    total -= r.value;
    total_err -= r.error;
    const int axis = r.split_axis;
    for (double side : {-1.0, 1.0}) {
      Region child{r.tile, r.center, r.half};
      child.half(axis) *= 0.5;
      child.center(axis) += side * child.half(axis);
      rule->apply(integrand_for(r.tile), child, out.evaluations);
      total += child.value;
      total_err += child.error;
      queue.push(std::move(child));
    }
    ++out.regions;
  }
  // Recompute the sums to drop accumulated rounding from the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!queue.empty()) {
    total += queue.top().value;
    total_err += queue.top().error;
    queue.pop();
  }
  out.value = total;
  out.error = total_err;
  return out;
}

}  // namespace maskrl
