#include <maskrl/convex/containment.hpp>
#include <maskrl/envs/quadrotor.hpp>
#include <maskrl/envs/seeker.hpp>
#include <maskrl/harness/bootstrap.hpp>
#include <maskrl/harness/experiment.hpp>
#include <maskrl/harness/volume_report.hpp>
#include <maskrl/ppo/checkpoint.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace maskrl;

namespace {

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

int cmd_train(const std::string& config_file, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& mask, int threads) {
  ExperimentSpec spec = load_experiment(config_file);
  if (seed) spec.seeds = {*seed};
  if (mask) spec.masks = {parse_mask_kind(*mask)};
  const ExperimentResult result = run_experiment(spec, threads);
  for (const auto& r : result.runs) {
    if (r.ok)
      std::printf("%-15s seed %-4llu ok     final %.3f  eval %.3f ± %.3f  (%.1f s)\n", to_string(r.mask),
                  static_cast<unsigned long long>(r.seed), r.final_return, r.eval_mean, r.eval_std, r.seconds);
    else
      std::printf("%-15s seed %-4llu FAILED %s\n", to_string(r.mask), static_cast<unsigned long long>(r.seed),
                  r.error.c_str());
  }
  std::printf("manifest: %s\n", result.manifest.string().c_str());
  return result.all_ok() ? 0 : 1;
}

int cmd_eval(const std::string& dir, int episodes, bool deterministic, std::uint64_t seed) {
  const Checkpoint cp = load_checkpoint(dir);
  auto env = make_training_environment(cp.config);
  auto provider = make_training_provider(cp.config, *env);
  const MaskedPolicy mask = make_masked_policy(cp.config, *env);
  const EvaluationResult eval = evaluate_policy(cp.model, mask, *env, provider.get(), episodes, deterministic, seed);
  nlohmann::json out{{"env", to_string(cp.config.env)},
                     {"mask", to_string(cp.config.mask)},
                     {"step", cp.step},
                     {"episodes", episodes},
                     {"deterministic", deterministic},
                     {"mean_return", eval.mean_return},
                     {"std_return", eval.std_return},
                     {"collisions", eval.collisions},
                     {"goals", eval.goals},
                     {"fallbacks", eval.fallbacks}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_relevant_set(const std::string& env_name, const std::string& state_csv) {
  const EnvKind kind = parse_env_kind(env_name);
  const std::vector<double> values = parse_csv_numbers(state_csv);
  std::unique_ptr<Environment> env = make_environment(kind);
  if (kind == EnvKind::seeker) {
    if (values.size() != 7)
      throw std::invalid_argument("seeker state: agent_x,agent_y,goal_x,goal_y,obstacle_x,obstacle_y,radius");
    auto& seeker = dynamic_cast<SeekerEnv&>(*env);
    seeker.set_scene(Vector{{values[0], values[1]}}, Vector{{values[2], values[3]}}, Vector{{values[4], values[5]}},
                     values[6]);
  } else {
    if (static_cast<Index>(values.size()) != env->state_dim())
      throw std::invalid_argument("state needs " + std::to_string(env->state_dim()) + " values");
    dynamic_cast<QuadrotorEnv&>(*env).set_state(Eigen::Map<const Vector>(values.data(), env->state_dim()));
  }
  auto provider = make_provider(kind);
  const RelevantSetResult rs = provider->compute(*env);

  // A^r ⊆ A witness and a 10^4-sample volume estimate
  const ContainmentResult cont = zonotope_containment(rs.set, Zonotope::from_box(env->action_box()));
  nlohmann::json cert{{"certified", cont.certified}, {"norm", cont.norm}};
  if (cont.certificate) {
    std::vector<std::vector<double>> gamma;
    for (Index i = 0; i < cont.certificate->gamma.rows(); ++i) {
      gamma.emplace_back();
      for (Index j = 0; j < cont.certificate->gamma.cols(); ++j) gamma.back().push_back(cont.certificate->gamma(i, j));
    }
    const Vector& beta = cont.certificate->beta;
    cert["gamma"] = gamma;
    cert["beta"] = std::vector<double>(beta.data(), beta.data() + beta.size());
  }
  Rng mc_rng(0);
  const double volume = relative_volume_mc(rs.set, env->action_box(), 10000, mc_rng);

  nlohmann::json out{{"env", to_string(kind)},
                     {"set", rs.set},
                     {"scalings", std::vector<double>(rs.scalings.data(), rs.scalings.data() + rs.scalings.size())},
                     {"source", to_string(rs.source)},
                     {"fallback", rs.fallback},
                     {"certified", rs.certified},
                     {"kkt_residual", rs.kkt_residual},
                     {"containment", cert},
                     {"relative_volume", volume}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report_volumes(const std::string& runs, int states, int samples, std::uint64_t seed) {
  const Manifest manifest = load_manifest(runs);
  VolumeSampleSpec spec;
  spec.states = states;
  spec.samples_per_state = samples;
  spec.seed = seed;
  const VolumeReport report = volume_report(manifest.env, spec);
  const std::filesystem::path path = std::filesystem::path(runs) / "volumes.csv";
  std::ofstream out(path, std::ios::trunc);
  out << "index,relative_volume,fallback,state\n";
  for (size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    out << i << "," << row.relative_volume << "," << (row.fallback ? 1 : 0) << ",\"";
    for (Index k = 0; k < row.state.size(); ++k) out << (k ? " " : "") << row.state(k);
    out << "\"\n";
  }
  std::printf("%s mean relative volume %.4f over %zu states (%d fallbacks) -> %s\n", to_string(manifest.env),
              report.mean, report.rows.size(), report.fallbacks, path.string().c_str());
  return 0;
}

int cmd_report_curves(const std::string& runs, int resamples, std::uint64_t seed) {
  const Manifest manifest = load_manifest(runs);
  std::map<MaskKind, std::vector<std::filesystem::path>> files;
  for (const auto& r : manifest.runs)
    if (r.ok) files[r.mask].push_back(std::filesystem::path(runs) / r.directory / "metrics.csv");
  int written = 0;
  for (const auto& [mask, paths] : files) {
    if (paths.size() < 2) {
      std::fprintf(stderr, "%s: need at least two seeds for a confidence band, skipped\n", to_string(mask));
      continue;
    }
    BootstrapOptions options;
    options.resamples = resamples;
    options.seed = seed;
    const BootstrapBand band = bootstrap_ci(load_return_series(paths), options);
    const auto path = std::filesystem::path(runs) / ("curves_" + std::string(to_string(mask)) + ".csv");
    std::ofstream out(path, std::ios::trunc);
    out << "step,mean,lower,upper\n";
    out.precision(17);
    for (size_t i = 0; i < band.steps.size(); ++i)
      out << band.steps[i] << "," << band.mean[i] << "," << band.lower[i] << "," << band.upper[i] << "\n";
    std::printf("%s -> %s\n", to_string(mask), path.string().c_str());
    ++written;
  }
  return written > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maskrl: action masking for PPO on zonotope relevant sets"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train every (mask, seed) of an experiment config");
  std::string config_file;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::string> train_mask;
  int threads = 0;
  train->add_option("--config", config_file, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "Only this seed");
  train->add_option("--mask", train_mask, "Only this mask");
  train->add_option("--threads", threads, "Parallel runs (default: MASKRL_THREADS or 1)");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string checkpoint;
  int episodes = 10;
  bool deterministic = false;
  std::uint64_t eval_seed = 0;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--episodes", episodes, "Episodes")->check(CLI::PositiveNumber);
  eval->add_flag("--deterministic", deterministic, "Execute the mask-mapped mean action");
  eval->add_option("--seed", eval_seed, "Evaluation seed");

  auto* rel = app.add_subcommand("relevant-set", "Compute the relevant action set for one state");
  std::string env_name;
  std::string state_csv;
  rel->add_option("--env", env_name, "seeker | quad2d | quad3d")->required();
  rel->add_option("--state", state_csv, "Comma separated state")->required();

  auto* report = app.add_subcommand("report", "Summaries over a run directory");
  report->require_subcommand(1);
  std::string runs;
  int states = 200;
  int samples = 10000;
  int resamples = 10000;
  std::uint64_t report_seed = 0;
  auto* volumes = report->add_subcommand("volumes", "Monte-Carlo relative volume of A^r");
  volumes->add_option("--runs", runs, "Experiment output directory")->required();
  volumes->add_option("--states", states, "Visited states")->check(CLI::PositiveNumber);
  volumes->add_option("--samples", samples, "Samples per state")->check(CLI::PositiveNumber);
  volumes->add_option("--seed", report_seed, "Sampling seed");
  auto* curves = report->add_subcommand("curves", "Bootstrapped return curves per mask");
  curves->add_option("--runs", runs, "Experiment output directory")->required();
  curves->add_option("--resamples", resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  curves->add_option("--seed", report_seed, "Bootstrap seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(config_file, train_seed, train_mask, threads);
    if (*eval) return cmd_eval(checkpoint, episodes, deterministic, eval_seed);
    if (*rel) return cmd_relevant_set(env_name, state_csv);
    if (*volumes) return cmd_report_volumes(runs, states, samples, report_seed);
    if (*curves) return cmd_report_curves(runs, resamples, report_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
