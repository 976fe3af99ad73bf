#pragma once

#include <maskrl/geometry/zonotope.hpp>

#include <functional>

namespace maskrl {

/// Unnormalized log-density; an empty function means uniform.
using LogDensity = std::function<double(const Vector&)>;

struct HitAndRunOptions {
  /// Iterations per returned sample; negative means N³.
  int iterations = -1;
  int grid_points = 256;
  int max_direction_retries = 16;
};

/// Segment {x + t·d : lo <= t <= hi} of the line through x inside z.
struct Chord {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

Chord zonotope_chord(const Zonotope& z, const Vector& x, const Vector& direction);

/// Random-direction hit-and-run. Each move draws a uniform direction, finds
/// the chord with two boundary-point programs and samples the density
/// restricted to the chord by inverse CDF on a fixed grid.
class HitAndRunChain {
 public:
  HitAndRunChain(Zonotope z, Vector start, LogDensity log_density = {}, HitAndRunOptions options = {});

  /// One move of the chain.
  const Vector& step(Rng& rng);
  /// The configured number of moves (N³ by default); returns the final point.
  const Vector& sample(Rng& rng);

  const Vector& current() const { return x_; }
  int iterations_per_sample() const { return iterations_; }

 private:
  double sample_on_chord(const Vector& d, const Chord& chord, Rng& rng) const;

  Zonotope z_;
  Vector x_;
  LogDensity log_density_;
  HitAndRunOptions options_;
  int iterations_;
};

/// Runs a fresh chain from x0 for the configured number of moves.
Vector hit_and_run_sample(const LogDensity& log_density, const Zonotope& z, const Vector& x0, Rng& rng,
                          const HitAndRunOptions& options = {});

}  // namespace maskrl
