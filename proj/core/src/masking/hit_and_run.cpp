#include <maskrl/masking/hit_and_run.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace maskrl {

Chord zonotope_chord(const Zonotope& z, const Vector& x, const Vector& direction) {
  Chord c;
  c.hi = boundary_point(z, x, direction).alpha;
  c.lo = -boundary_point(z, x, -direction).alpha;
  return c;
}

HitAndRunChain::HitAndRunChain(Zonotope z, Vector start, LogDensity log_density, HitAndRunOptions options)
    : z_(std::move(z)), x_(std::move(start)), log_density_(std::move(log_density)), options_(options) {
  if (x_.size() != z_.dim()) throw std::invalid_argument("HitAndRunChain: start point dimension mismatch");
  if (!contains_point(z_, x_)) throw std::invalid_argument("HitAndRunChain: start point outside the set");
  if (options_.grid_points < 2) throw std::invalid_argument("HitAndRunChain: need at least two grid points");
  const int n = static_cast<int>(z_.dim());
  iterations_ = options_.iterations >= 0 ? options_.iterations : n * n * n;
}

double HitAndRunChain::sample_on_chord(const Vector& d, const Chord& chord, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!log_density_) return chord.lo + chord.length() * unit(rng);

  const int k = options_.grid_points;
  std::vector<double> t(static_cast<size_t>(k));
  std::vector<double> logp(static_cast<size_t>(k));
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    t[static_cast<size_t>(i)] = chord.lo + chord.length() * i / (k - 1);
    logp[static_cast<size_t>(i)] = log_density_(x_ + t[static_cast<size_t>(i)] * d);
    top = std::max(top, logp[static_cast<size_t>(i)]);
  }
  if (!std::isfinite(top)) return chord.lo + chord.length() * unit(rng);

  std::vector<double> w(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) w[static_cast<size_t>(i)] = std::exp(logp[static_cast<size_t>(i)] - top);
  std::vector<double> cdf(static_cast<size_t>(k), 0.0);
  for (int i = 1; i < k; ++i) {
    const size_t s = static_cast<size_t>(i);
    cdf[s] = cdf[s - 1] + 0.5 * (w[s] + w[s - 1]) * (t[s] - t[s - 1]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) return chord.lo + chord.length() * unit(rng);
  const double target = unit(rng) * total;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  const size_t hi = std::clamp<size_t>(static_cast<size_t>(it - cdf.begin()), 1, static_cast<size_t>(k - 1));
  const size_t lo = hi - 1;
  const double span = cdf[hi] - cdf[lo];
  const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
  return t[lo] + std::clamp(frac, 0.0, 1.0) * (t[hi] - t[lo]);
}

const Vector& HitAndRunChain::step(Rng& rng) {
  std::normal_distribution<double> normal;
  const Index n = z_.dim();
  for (int attempt = 0; attempt < options_.max_direction_retries; ++attempt) {
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = normal(rng);
    const double norm = d.norm();
    if (!(norm > 0.0)) continue;
    d /= norm;
    Chord chord;
    try {
      chord = zonotope_chord(z_, x_, d);
    } catch (const std::domain_error&) {
      continue;
    }
    if (!(chord.length() > 1e-12)) continue;
    // Keep iterates off the exact boundary so the next chord program stays feasible.
    const double shrink = 1.0 - 1e-10;
    chord.lo *= shrink;
    chord.hi *= shrink;
    x_ = x_ + sample_on_chord(d, chord, rng) * d;
    return x_;
  }
  return x_;
}

const Vector& HitAndRunChain::sample(Rng& rng) {
  for (int i = 0; i < iterations_; ++i) step(rng);
  return x_;
}

Vector hit_and_run_sample(const LogDensity& log_density, const Zonotope& z, const Vector& x0, Rng& rng,
                          const HitAndRunOptions& options) {
  HitAndRunChain chain(z, x0, log_density, options);
  return chain.sample(rng);
}

}  // namespace maskrl
