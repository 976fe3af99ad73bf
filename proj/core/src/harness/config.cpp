#include <maskrl/harness/config.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace maskrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    // allow 1e5 style integers
    const double d = to_double(key, v);
    if (d != static_cast<double>(static_cast<long>(d))) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<long>(d);
  }
  return out;
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a seed, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& override_keys() {
  static const std::vector<std::string> keys{
      "learning_rate", "gamma",      "n_steps",         "n_epochs",   "batch_size",     "max_grad_norm",
      "ent_coef",      "log_std_init", "vf_coef",       "clip_range", "gae_lambda",     "activation",
      "hidden_layers", "neurons",    "log_every",       "full_action_set", "eps_lin", "relevant_state_scale",
      "cubature_rel_tol"};
  return keys;
}

void apply_override(TrainConfig& c, const std::string& key, const std::string& v) {
  if (key == "learning_rate") c.learning_rate = to_double(key, v);
  else if (key == "gamma") c.gamma = to_double(key, v);
  else if (key == "n_steps") c.n_steps = to_long(key, v);
  else if (key == "n_epochs") c.n_epochs = to_long(key, v);
  else if (key == "batch_size") c.batch_size = to_long(key, v);
  else if (key == "max_grad_norm") c.max_grad_norm = to_double(key, v);
  else if (key == "ent_coef") c.ent_coef = to_double(key, v);
  else if (key == "log_std_init") c.log_std_init = to_double(key, v);
  else if (key == "vf_coef") c.vf_coef = to_double(key, v);
  else if (key == "clip_range") c.clip_range = to_double(key, v);
  else if (key == "gae_lambda") c.gae_lambda = to_double(key, v);
  else if (key == "activation") {
    try {
      c.activation = parse_activation(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  } else if (key == "hidden_layers") c.hidden_layers = to_long(key, v);
  else if (key == "neurons") c.neurons = to_long(key, v);
  else if (key == "log_every") c.log_every = to_long(key, v);
  else if (key == "full_action_set") c.full_action_set = to_bool(key, v);
  else if (key == "eps_lin") c.eps_lin = to_double(key, v);
  else if (key == "relevant_state_scale") c.relevant_state_scale = to_double(key, v);
  else if (key == "cubature_rel_tol") c.cubature_rel_tol = to_double(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

void ExperimentSpec::validate() const {
  if (masks.empty()) throw ConfigError("masks: at least one mask is required");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (total_steps <= 0) throw ConfigError("total_steps must be positive");
  if (eval_episodes <= 0) throw ConfigError("eval_episodes must be positive");
  std::set<MaskKind> unique_masks(masks.begin(), masks.end());
  if (unique_masks.size() != masks.size()) throw ConfigError("masks: duplicate entries");
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) throw ConfigError("seeds: duplicate entries");
  for (MaskKind m : masks) {
    try {
      resolve_config(*this, m, seeds.front()).validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(to_string(m)) + ": " + e.what());
    }
  }
}

ExperimentSpec parse_experiment(const std::string& text) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      if (key == "env") {
        spec.env = parse_env_kind(value);
      } else if (key == "masks") {
        spec.masks.clear();
        for (const auto& m : split_list(value)) spec.masks.push_back(parse_mask_kind(m));
      } else if (key == "seeds") {
        spec.seeds.clear();
        for (const auto& s : split_list(value)) spec.seeds.push_back(to_seed(key, s));
      } else if (key == "total_steps") {
        spec.total_steps = to_long(key, value);
      } else if (key == "eval_episodes") {
        spec.eval_episodes = static_cast<int>(to_long(key, value));
      } else if (key == "output") {
        spec.output_dir = value;
      } else if (const auto dot = key.find('.'); dot != std::string::npos) {
        const MaskKind mask = parse_mask_kind(key.substr(0, dot));
        const std::string sub = key.substr(dot + 1);
        TrainConfig probe;
        apply_override(probe, sub, value);
        spec.mask_overrides[mask][sub] = value;
      } else {
        TrainConfig probe;
        apply_override(probe, key, value);
        spec.overrides[key] = value;
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + e.what());
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

TrainConfig resolve_config(const ExperimentSpec& spec, MaskKind mask, std::uint64_t seed) {
  TrainConfig c = default_config(spec.env, mask);
  for (const auto& [k, v] : spec.overrides) apply_override(c, k, v);
  if (auto it = spec.mask_overrides.find(mask); it != spec.mask_overrides.end())
    for (const auto& [k, v] : it->second) apply_override(c, k, v);
  c.seed = seed;
  c.total_steps = spec.total_steps;
  c.eval_episodes = spec.eval_episodes;
  return c;
}

}  // namespace maskrl
