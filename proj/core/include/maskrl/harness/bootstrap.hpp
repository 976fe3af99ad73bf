#pragma once

#include <maskrl/types.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace maskrl {

/// Per-seed curves sampled at the same steps.
struct MetricSeries {
  std::vector<long> steps;
  /// values[seed][i] belongs to steps[i].
  std::vector<std::vector<double>> values;

  /// Throws std::invalid_argument unless steps increase and every seed has one value per step.
  void validate() const;
};

struct BootstrapBand {
  std::vector<long> steps;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct BootstrapOptions {
  int resamples = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// Percentile bootstrap of the across-seed mean at every step. Values are
/// sorted per step before resampling, so the result ignores seed order.
/// Needs at least two seeds.
BootstrapBand bootstrap_ci(const MetricSeries& series, const BootstrapOptions& options = {});

/// Linear-interpolation quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double q);

/// Reads `episode_return_mean` from each metrics CSV and keeps the steps
/// common to all files. Throws on a header mismatch.
MetricSeries load_return_series(const std::vector<std::filesystem::path>& metrics_files);

}  // namespace maskrl
