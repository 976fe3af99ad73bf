#pragma once

#include <maskrl/envs/environment.hpp>
#include <maskrl/geometry/zonotope.hpp>

#include <cstdint>
#include <vector>

namespace maskrl {

/// Facet description {x : Hx <= h} of a full-dimensional zonotope: one facet
/// pair per set of N-1 linearly independent generators. Empty H when the
/// zonotope is flat.
struct ZonotopeFacets {
  Matrix normals;
  Vector offsets;
  bool full_dimensional = false;

  bool contains(const Vector& x, double tol = 1e-12) const;
};
ZonotopeFacets zonotope_facets(const Zonotope& z);

/// Fraction of `samples` uniform draws from `box` that land in `relevant`.
/// Flat sets have measure zero and return 0 without sampling.
double relative_volume_mc(const Zonotope& relevant, const IntervalBox& box, int samples, Rng& rng);

struct VolumeSampleSpec {
  /// States are visited along episodes of a uniformly random policy whose
  /// actions pass through the replacement filter.
  int states = 200;
  int samples_per_state = 10000;
  std::uint64_t seed = 0;
  /// Use A^r = A instead of the computed relevant set.
  bool full_action_set = false;
};

struct VolumeRow {
  Vector state;
  double relative_volume = 0.0;
  bool fallback = false;
};

struct VolumeReport {
  double mean = 0.0;
  int fallbacks = 0;
  std::vector<VolumeRow> rows;
};

VolumeReport volume_report(EnvKind env, const VolumeSampleSpec& spec = {});

}  // namespace maskrl
