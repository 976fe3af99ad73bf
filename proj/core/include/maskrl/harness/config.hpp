#pragma once

#include <maskrl/ppo/trainer.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace maskrl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training campaign: every mask is trained once per seed.
struct ExperimentSpec {
  EnvKind env = EnvKind::seeker;
  std::vector<MaskKind> masks{MaskKind::none};
  std::vector<std::uint64_t> seeds{0};
  long total_steps = 100000;
  int eval_episodes = 10;
  std::filesystem::path output_dir = "runs";
  /// Hyperparameter overrides for every mask, then per mask.
  std::map<std::string, std::string> overrides;
  std::map<MaskKind, std::map<std::string, std::string>> mask_overrides;

  void validate() const;
};

/// Parses the key = value format:
///
///   # comment
///   env = seeker
///   masks = none, ray
///   seeds = 0, 1, 2
///   learning_rate = 1e-4        # all masks
///   ray.learning_rate = 8e-4    # one mask
///
/// Unknown keys, malformed values and duplicates raise ConfigError with the
/// line number.
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& file);

/// Tuned defaults for (env, mask), then the overrides, then the spec's seed,
/// step budget and evaluation episodes.
TrainConfig resolve_config(const ExperimentSpec& spec, MaskKind mask, std::uint64_t seed);

/// Applies one hyperparameter override; throws ConfigError for unknown keys.
void apply_override(TrainConfig& config, const std::string& key, const std::string& value);

/// Keys accepted as hyperparameter overrides.
const std::vector<std::string>& override_keys();

}  // namespace maskrl
