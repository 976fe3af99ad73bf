#pragma once

#include <maskrl/ppo/trainer.hpp>

#include <filesystem>

namespace maskrl {

inline constexpr int kCheckpointVersion = 1;

/// Writes <dir>/params.bin (raw little-endian binary64, layout of
/// ActorCritic::params) and <dir>/meta.json (architecture, config, hash, step).
void save_checkpoint(const std::filesystem::path& dir, const ActorCritic& model, const TrainConfig& config, long step);

struct Checkpoint {
  TrainConfig config;
  ActorCritic model;
  long step = 0;
  std::string config_hash;
};

/// Throws std::runtime_error on a missing, truncated or inconsistent checkpoint.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace maskrl
