#include <maskrl/harness/bootstrap.hpp>

#include <maskrl/ppo/trainer.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace maskrl {

void MetricSeries::validate() const {
  for (size_t i = 1; i < steps.size(); ++i)
    if (steps[i] <= steps[i - 1]) throw std::invalid_argument("MetricSeries: steps must increase");
  for (const auto& v : values)
    if (v.size() != steps.size()) throw std::invalid_argument("MetricSeries: every seed needs one value per step");
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("sorted_quantile: empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapBand bootstrap_ci(const MetricSeries& series, const BootstrapOptions& options) {
  series.validate();
  const size_t seeds = series.values.size();
  if (seeds < 2) throw std::invalid_argument("bootstrap_ci: need at least two seeds");
  if (options.resamples < 1) throw std::invalid_argument("bootstrap_ci: need at least one resample");
  if (!(options.level > 0.0 && options.level < 1.0)) throw std::invalid_argument("bootstrap_ci: level must be in (0, 1)");

  BootstrapBand band;
  band.steps = series.steps;
  Rng rng(options.seed);
  std::uniform_int_distribution<size_t> pick(0, seeds - 1);
  std::vector<double> column(seeds);
  std::vector<double> means(static_cast<size_t>(options.resamples));
  const double tail = 0.5 * (1.0 - options.level);
  for (size_t i = 0; i < series.steps.size(); ++i) {
    for (size_t s = 0; s < seeds; ++s) column[s] = series.values[s][i];
    std::sort(column.begin(), column.end());
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= static_cast<double>(seeds);
    for (auto& m : means) {
      double sum = 0.0;
      for (size_t k = 0; k < seeds; ++k) sum += column[pick(rng)];
      m = sum / static_cast<double>(seeds);
    }
    std::sort(means.begin(), means.end());
    band.mean.push_back(mean);
    band.lower.push_back(std::min(mean, sorted_quantile(means, tail)));
    band.upper.push_back(std::max(mean, sorted_quantile(means, 1.0 - tail)));
  }
  return band;
}

MetricSeries load_return_series(const std::vector<std::filesystem::path>& metrics_files) {
  std::vector<std::map<long, double>> per_file;
  for (const auto& path : metrics_files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != kMetricsHeader) throw std::runtime_error(path.string() + ": unexpected metrics header");
    std::map<long, double> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream fields(line);
      std::string step;
      std::string mean;
      std::getline(fields, step, ',');
      std::getline(fields, mean, ',');
      rows[std::stol(step)] = std::stod(mean);
    }
    per_file.push_back(std::move(rows));
  }
  MetricSeries series;
  if (per_file.empty()) return series;
  for (const auto& [step, value] : per_file.front()) {
    bool everywhere = true;
    for (const auto& f : per_file) everywhere = everywhere && f.count(step) && std::isfinite(f.at(step));
    if (everywhere) series.steps.push_back(step);
  }
  for (const auto& f : per_file) {
    std::vector<double> v;
    for (long s : series.steps) v.push_back(f.at(s));
    series.values.push_back(std::move(v));
  }
  return series;
}

}  // namespace maskrl
