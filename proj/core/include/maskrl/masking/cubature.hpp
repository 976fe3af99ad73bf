#pragma once

#include <maskrl/masking/hit_and_run.hpp>

#include <stdexcept>
#include <vector>

namespace maskrl {

/// {center + G y : ‖y‖∞ <= 1} with square G.
struct Parallelotope {
  Vector center;
  Matrix generators;
};

/// Splits a zonotope into parallelotopes with disjoint interiors, one per
/// linearly independent N-subset of generators. The tiling is read off the
/// upper faces of the zonotope lifted by generic heights.
std::vector<Parallelotope> zonotope_tiling(const Zonotope& z);

struct CubatureResult {
  double value = 0.0;
  double error = 0.0;
  int regions = 0;
  int evaluations = 0;
};

class CubatureError : public std::runtime_error {
 public:
  CubatureError(const std::string& what, double value, double error)
      : std::runtime_error(what), value_(value), error_(error) {}
  double value() const { return value_; }
  double error() const { return error_; }

 private:
  double value_;
  double error_;
};

struct CubatureOptions {
  double rel_tol = 1e-3;
  /// Absolute error that is always good enough (vanishing integrands).
  double abs_tol = 1e-12;
  int max_regions = 20000;
  int max_tiles = 20000;
};

/// ∫_z exp(log_density(x)) dx. Each tile is mapped to the unit cube and
/// integrated by globally adaptive subdivision: a degree-7/5 Genz-Malik pair
/// for N >= 2 and Gauss-Kronrod 7/15 for N = 1. Refinement stops once the
/// estimated error is below max(rel_tol·|I|, abs_tol).
CubatureResult cubature_integral(const LogDensity& log_density, const Zonotope& z, const CubatureOptions& options = {});

}  // namespace maskrl
