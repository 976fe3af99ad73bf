#include <maskrl/harness/experiment.hpp>

#include <maskrl/ppo/checkpoint.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace maskrl {

bool ExperimentResult::all_ok() const {
  for (const auto& r : runs)
    if (!r.ok) return false;
  return true;
}

std::string run_directory(MaskKind mask, std::uint64_t seed) {
  return std::string(to_string(mask)) + "/seed_" + std::to_string(seed);
}

int thread_budget(int fallback) {
  if (const char* v = std::getenv("MASKRL_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return fallback;
}

RunRecord run_single(const TrainConfig& config, const std::filesystem::path& dir) {
  RunRecord record;
  record.mask = config.mask;
  record.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(dir);
  std::filesystem::remove(dir / "error.txt");
  try {
    {
      std::ofstream out(dir / "config.json", std::ios::trunc);
      out << nlohmann::json(config).dump(2) << "\n";
    }
    std::ofstream csv(dir / "metrics.csv", std::ios::trunc);
    csv << kMetricsHeader << "\n";
    Trainer trainer(config);
    const TrainResult result = trainer.run([&](const MetricRow& row) { csv << metrics_csv_line(row) << "\n"; });
    csv.flush();
    if (!csv) throw std::runtime_error("cannot write metrics.csv");
    save_checkpoint(dir / "checkpoint", trainer.model(), config, result.steps);

    auto provider = make_training_provider(config, trainer.environment());
    const EvaluationResult eval = evaluate_policy(trainer.model(), trainer.mask(), trainer.environment(),
                                                  provider.get(), config.eval_episodes, true, config.seed + 1000003);
    nlohmann::json ej{{"episodes", config.eval_episodes},
                      {"deterministic", true},
                      {"mean_return", eval.mean_return},
                      {"std_return", eval.std_return},
                      {"returns", eval.returns},
                      {"collisions", eval.collisions},
                      {"goals", eval.goals},
                      {"fallbacks", eval.fallbacks}};
    const RolloutTelemetry& tel = result.telemetry;
    nlohmann::json tj{{"steps", tel.steps},
                      {"episodes", tel.episodes},
                      {"clamped", tel.clamped},
                      {"replaced", tel.replaced},
                      {"underflows", tel.underflows},
                      {"fallbacks", tel.fallbacks},
                      {"uncertified", tel.uncertified},
                      {"collisions", tel.collisions},
                      {"goals", tel.goals},
                      {"membership_violations", tel.membership_violations}};
    {
      std::ofstream out(dir / "eval.json", std::ios::trunc);
      out << ej.dump(2) << "\n";
    }
    {
      std::ofstream out(dir / "telemetry.json", std::ios::trunc);
      out << tj.dump(2) << "\n";
    }
    record.ok = true;
    record.steps = result.steps;
    record.final_return = result.metrics.empty() ? 0.0 : result.metrics.back().episode_return_mean;
    record.eval_mean = eval.mean_return;
    record.eval_std = eval.std_return;
    record.collisions = tel.collisions;
    record.fallbacks = tel.fallbacks;
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
    std::ofstream out(dir / "error.txt", std::ios::trunc);
    out << e.what() << "\n";
  }
  record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

nlohmann::json manifest_json(const ExperimentSpec& spec, const std::vector<RunRecord>& runs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : runs) {
    list.push_back({{"mask", to_string(r.mask)},
                    {"seed", r.seed},
                    {"directory", r.directory},
                    {"status", r.ok ? "ok" : "failed"},
                    {"error", r.error},
                    {"steps", r.steps},
                    {"final_return", r.final_return},
                    {"eval_mean", r.eval_mean},
                    {"eval_std", r.eval_std},
                    {"collisions", r.collisions},
                    {"fallbacks", r.fallbacks}});
  }
  std::vector<std::string> masks;
  for (MaskKind m : spec.masks) masks.emplace_back(to_string(m));
  return {{"schema_version", kManifestSchemaVersion},
          {"env", to_string(spec.env)},
          {"masks", masks},
          {"seeds", spec.seeds},
          {"total_steps", spec.total_steps},
          {"eval_episodes", spec.eval_episodes},
          {"runs", list}};
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int parallelism) {
  spec.validate();
  struct Job {
    TrainConfig config;
    std::string directory;
  };
  std::vector<Job> jobs;
  for (MaskKind m : spec.masks)
    for (std::uint64_t s : spec.seeds) jobs.push_back({resolve_config(spec, m, s), run_directory(m, s)});

  std::filesystem::create_directories(spec.output_dir);
  std::vector<RunRecord> records(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      records[i] = run_single(jobs[i].config, spec.output_dir / jobs[i].directory);
      records[i].directory = jobs[i].directory;
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism > 0 ? parallelism : thread_budget(1),
                                                static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentResult result;
  result.runs = std::move(records);
  result.manifest = spec.output_dir / "manifest.json";
  std::ofstream out(result.manifest, std::ios::trunc);
  out << manifest_json(spec, result.runs).dump(2) << "\n";
  return result;
}

namespace {

double number_or_nan(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("missing " + (dir / "manifest.json").string());
  const nlohmann::json j = nlohmann::json::parse(in);
  Manifest m;
  m.schema_version = j.at("schema_version").get<int>();
  if (m.schema_version != kManifestSchemaVersion) throw std::runtime_error("unsupported manifest schema version");
  m.env = parse_env_kind(j.at("env").get<std::string>());
  for (const auto& r : j.at("runs")) {
    RunRecord rec;
    rec.mask = parse_mask_kind(r.at("mask").get<std::string>());
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.directory = r.at("directory").get<std::string>();
    rec.ok = r.at("status").get<std::string>() == "ok";
    rec.error = r.at("error").get<std::string>();
    rec.steps = r.at("steps").get<long>();
    rec.final_return = number_or_nan(r.at("final_return"));
    rec.eval_mean = number_or_nan(r.at("eval_mean"));
    rec.eval_std = number_or_nan(r.at("eval_std"));
    rec.collisions = r.at("collisions").get<long>();
    rec.fallbacks = r.at("fallbacks").get<long>();
    if (!std::filesystem::is_directory(dir / rec.directory))
      throw std::runtime_error("manifest lists a missing run directory: " + rec.directory);
    m.runs.push_back(std::move(rec));
  }
  return m;
}

}  // namespace maskrl
