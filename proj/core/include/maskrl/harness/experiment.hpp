#pragma once

#include <maskrl/harness/config.hpp>

#include <nlohmann/json_fwd.hpp>

namespace maskrl {

inline constexpr int kManifestSchemaVersion = 1;

struct RunRecord {
  MaskKind mask = MaskKind::none;
  std::uint64_t seed = 0;
  /// Relative to the output directory.
  std::string directory;
  bool ok = false;
  std::string error;
  long steps = 0;
  /// Last logged episode_return_mean.
  double final_return = 0.0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  long collisions = 0;
  long fallbacks = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::filesystem::path manifest;
  bool all_ok() const;
};

/// Directory of one run: <mask>/seed_<n>.
std::string run_directory(MaskKind mask, std::uint64_t seed);

/// Trains and evaluates a single configuration into `dir`: config.json,
/// metrics.csv, checkpoint/, eval.json. Failures are written to error.txt
/// and reported in the record.
RunRecord run_single(const TrainConfig& config, const std::filesystem::path& dir);

/// Runs every (mask, seed) pair with up to `parallelism` worker threads
/// (0: MASKRL_THREADS, else 1) and writes manifest.json once at the end.
ExperimentResult run_experiment(const ExperimentSpec& spec, int parallelism = 0);

/// MASKRL_THREADS if set to a positive integer, else `fallback`.
int thread_budget(int fallback = 1);

nlohmann::json manifest_json(const ExperimentSpec& spec, const std::vector<RunRecord>& runs);

struct Manifest {
  int schema_version = 0;
  EnvKind env = EnvKind::seeker;
  std::vector<RunRecord> runs;
};

/// Reads <dir>/manifest.json and checks that each listed run directory exists.
Manifest load_manifest(const std::filesystem::path& dir);

}  // namespace maskrl
