#include <maskrl/ppo/checkpoint.hpp>

#include <nlohmann/json.hpp>

#include <bit>
#include <fstream>

namespace maskrl {

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

void save_checkpoint(const std::filesystem::path& dir, const ActorCritic& model, const TrainConfig& config, long step) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "params.bin", std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(model.params().data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(model.num_params())));
    if (!out) throw std::runtime_error("save_checkpoint: cannot write " + (dir / "params.bin").string());
  }
  const NetworkShape& s = model.shape();
  nlohmann::json meta{{"version", kCheckpointVersion},
                      {"architecture",
                       {{"observation_dim", s.observation_dim},
                        {"policy_dim", s.policy_dim},
                        {"hidden_layers", s.hidden_layers},
                        {"neurons", s.neurons},
                        {"activation", to_string(s.activation)},
                        {"num_params", model.num_params()}}},
                      {"config", config},
                      {"config_hash", config_hash(config)},
                      {"step", step}};
  std::ofstream out(dir / "meta.json", std::ios::trunc);
  out << meta.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_checkpoint: cannot write " + (dir / "meta.json").string());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw std::runtime_error("load_checkpoint: missing " + (dir / "meta.json").string());
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  if (meta.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("load_checkpoint: unsupported checkpoint version");

  Checkpoint cp;
  cp.config = meta.at("config").get<TrainConfig>();
  cp.step = meta.at("step").get<long>();
  cp.config_hash = meta.at("config_hash").get<std::string>();
  if (cp.config_hash != config_hash(cp.config)) throw std::runtime_error("load_checkpoint: config hash mismatch");

  const auto& arch = meta.at("architecture");
  NetworkShape shape;
  shape.observation_dim = arch.at("observation_dim").get<Index>();
  shape.policy_dim = arch.at("policy_dim").get<Index>();
  shape.hidden_layers = arch.at("hidden_layers").get<Index>();
  shape.neurons = arch.at("neurons").get<Index>();
  shape.activation = parse_activation(arch.at("activation").get<std::string>());
  cp.model = ActorCritic(shape);
  if (cp.model.num_params() != arch.at("num_params").get<Index>())
    throw std::runtime_error("load_checkpoint: parameter count does not match the architecture");

  std::ifstream in(dir / "params.bin", std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: missing " + (dir / "params.bin").string());
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(cp.model.num_params()));
  in.read(reinterpret_cast<char*>(cp.model.params().data()), bytes);
  if (in.gcount() != bytes || in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("load_checkpoint: params.bin has the wrong size");
  return cp;
}

}  // namespace maskrl
