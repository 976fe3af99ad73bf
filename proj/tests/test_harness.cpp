#include "oracles.hpp"

#include <maskrl/harness/bootstrap.hpp>
#include <maskrl/harness/config.hpp>
#include <maskrl/harness/experiment.hpp>
#include <maskrl/harness/volume_report.hpp>

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace maskrl;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("maskrl_test_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

void write_metrics(const fs::path& file, const std::vector<std::pair<long, double>>& rows) {
  std::ofstream out(file);
  out << kMetricsHeader << "\n";
  for (const auto& [step, value] : rows) {
    MetricRow r;
    r.step = step;
    r.episode_return_mean = value;
    out << metrics_csv_line(r) << "\n";
  }
}

}  // namespace

TEST(ExperimentConfig, ParsesAllKeys) {
  const ExperimentSpec spec = parse_experiment(R"(# campaign
env = quad2d
masks = none, ray ,generator
seeds = 3, 4
total_steps = 4096
eval_episodes = 2
output = out/dir
learning_rate = 1e-4   # everyone
ray.n_steps = 512
)");
  EXPECT_EQ(spec.env, EnvKind::quad2d);
  ASSERT_EQ(spec.masks.size(), 3u);
  EXPECT_EQ(spec.masks[2], MaskKind::generator);
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(spec.total_steps, 4096);
  EXPECT_EQ(spec.output_dir, fs::path("out/dir"));

  const TrainConfig ray = resolve_config(spec, MaskKind::ray, 4);
  EXPECT_DOUBLE_EQ(ray.learning_rate, 1e-4);
  EXPECT_EQ(ray.n_steps, 512);
  EXPECT_EQ(ray.seed, 4u);
  EXPECT_EQ(ray.total_steps, 4096);
  EXPECT_EQ(ray.eval_episodes, 2);
  const TrainConfig gen = resolve_config(spec, MaskKind::generator, 3);
  EXPECT_EQ(gen.n_steps, default_config(EnvKind::quad2d, MaskKind::generator).n_steps);
  EXPECT_DOUBLE_EQ(gen.gamma, 0.99);
}

TEST(ExperimentConfig, RejectsBadInput) {
  EXPECT_THROW(parse_experiment("env = seeker\nwarp_factor = 9\n"), ConfigError);
  EXPECT_THROW(parse_experiment("env = seeker\nmasks = none, shield\n"), std::exception);
  EXPECT_THROW(parse_experiment("env = seeker\nenv = quad2d\n"), ConfigError);
  EXPECT_THROW(parse_experiment("env = seeker\nseeds = 1, x\n"), ConfigError);
  EXPECT_THROW(parse_experiment("env seeker\n"), ConfigError);
  EXPECT_THROW(parse_experiment("env = seeker\nray.warp = 2\n"), ConfigError);
  EXPECT_THROW(parse_experiment("env = seeker\nclip_range = 4\n"), std::exception);
  try {
    parse_experiment("env = seeker\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST(ExperimentConfig, OverrideKeysAreApplied) {
  const std::set<std::string> integer_keys{"n_steps", "n_epochs", "batch_size", "hidden_layers", "neurons", "log_every"};
  TrainConfig c;
  for (const std::string& key : override_keys()) {
    if (key == "activation")
      apply_override(c, key, "tanh");
    else if (key == "full_action_set")
      apply_override(c, key, "true");
    else if (integer_keys.count(key))
      apply_override(c, key, "7");
    else
      apply_override(c, key, "0.5");
  }
  EXPECT_EQ(c.activation, Activation::tanh);
  EXPECT_TRUE(c.full_action_set);
  EXPECT_EQ(c.n_steps, 7);
  EXPECT_EQ(c.neurons, 7);
  EXPECT_DOUBLE_EQ(c.gae_lambda, 0.5);
  EXPECT_DOUBLE_EQ(c.cubature_rel_tol, 0.5);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(apply_override(c, "nope", "1"), ConfigError);
  EXPECT_THROW(apply_override(c, "n_steps", "many"), ConfigError);
}

TEST(ExperimentConfig, ShippedConfigsParse) {
  for (const char* name : {"seeker.cfg", "quad2d.cfg", "quad3d.cfg", "seeker_smoke.cfg"}) {
    const fs::path file = fs::path(MASKRL_SOURCE_DIR) / "configs" / name;
    const ExperimentSpec spec = load_experiment(file);
    EXPECT_NO_THROW(spec.validate()) << name;
    for (MaskKind m : spec.masks) EXPECT_NO_THROW(resolve_config(spec, m, spec.seeds.front()).validate()) << name;
  }
}

TEST(Bootstrap, IdenticalSeedsCollapseTheBand) {
  MetricSeries s;
  s.steps = {10, 20};
  s.values = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
  const BootstrapBand b = bootstrap_ci(s);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(b.mean[i], s.values[0][i]);
    EXPECT_DOUBLE_EQ(b.lower[i], s.values[0][i]);
    EXPECT_DOUBLE_EQ(b.upper[i], s.values[0][i]);
  }
}

TEST(Bootstrap, TwoPointSample) {
  // resampled means of {0, 10} take values 0, 5, 10 with probabilities 1/4, 1/2, 1/4
  MetricSeries s;
  s.steps = {1};
  s.values = {{0.0}, {10.0}};
  const BootstrapBand b = bootstrap_ci(s, {20000, 0.95, 3});
  EXPECT_DOUBLE_EQ(b.mean[0], 5.0);
  EXPECT_DOUBLE_EQ(b.lower[0], 0.0);
  EXPECT_DOUBLE_EQ(b.upper[0], 10.0);
  const BootstrapBand narrow = bootstrap_ci(s, {20000, 0.4, 3});
  EXPECT_DOUBLE_EQ(narrow.lower[0], 5.0);
  EXPECT_DOUBLE_EQ(narrow.upper[0], 5.0);
}

TEST(Bootstrap, SeedOrderDoesNotMatter) {
  MetricSeries s;
  s.steps = {1, 2};
  s.values = {{1.0, -3.0}, {4.0, 2.0}, {0.5, 7.0}, {2.0, 1.0}};
  MetricSeries r = s;
  std::reverse(r.values.begin(), r.values.end());
  const BootstrapBand a = bootstrap_ci(s, {2000, 0.9, 5});
  const BootstrapBand b = bootstrap_ci(r, {2000, 0.9, 5});
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
}

TEST(Bootstrap, CoverageOfTheMean) {
  Rng rng(17);
  std::normal_distribution<double> nd(3.0, 2.0);
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    MetricSeries s;
    s.steps = {1};
    for (int k = 0; k < 10; ++k) s.values.push_back({nd(rng)});
    const BootstrapBand b = bootstrap_ci(s, {2000, 0.95, static_cast<std::uint64_t>(t)});
    covered += b.lower[0] <= 3.0 && 3.0 <= b.upper[0];
  }
  const double coverage = static_cast<double>(covered) / trials;
  // percentile intervals undercover a little at n = 10
  EXPECT_GE(coverage, 0.90);
  EXPECT_LE(coverage, 0.99);
}

TEST(Bootstrap, InputValidation) {
  MetricSeries one;
  one.steps = {1};
  one.values = {{1.0}};
  EXPECT_THROW(bootstrap_ci(one), std::invalid_argument);
  MetricSeries ragged;
  ragged.steps = {1, 2};
  ragged.values = {{1.0, 2.0}, {1.0}};
  EXPECT_THROW(bootstrap_ci(ragged), std::invalid_argument);
  EXPECT_DOUBLE_EQ(sorted_quantile({1.0, 2.0, 3.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sorted_quantile({1.0, 2.0, 3.0, 4.0}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sorted_quantile({1.0, 2.0, 3.0, 4.0}, 1.0), 4.0);
}

TEST(Bootstrap, LoadsCommonFiniteSteps) {
  const fs::path dir = scratch_dir("series");
  fs::create_directories(dir);
  write_metrics(dir / "a.csv", {{2048, -5.0}, {4096, -4.0}, {6144, -3.0}});
  write_metrics(dir / "b.csv", {{2048, std::nan("")}, {4096, -2.0}, {6144, -1.0}});
  const MetricSeries s = load_return_series({dir / "a.csv", dir / "b.csv"});
  EXPECT_EQ(s.steps, (std::vector<long>{4096, 6144}));
  EXPECT_DOUBLE_EQ(s.values[1][0], -2.0);
  std::ofstream(dir / "bad.csv") << "step,return\n1,2\n";
  EXPECT_THROW(load_return_series({dir / "a.csv", dir / "bad.csv"}), std::exception);
}

TEST(VolumeReport, FacetsAgreeWithPolygonOracle) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix g(2, 3);
    for (Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
    const Zonotope z(Vector{{u(rng), u(rng)}} * 0.2, g);
    const ZonotopeFacets f = zonotope_facets(z);
    ASSERT_TRUE(f.full_dimensional);
    for (int k = 0; k < 50; ++k) {
      const Vector x{{2.0 * u(rng), 2.0 * u(rng)}};
      const double margin = oracle::polygon_margin(oracle::zonotope_polygon(z.center(), z.generators()), x);
      if (std::abs(margin) < 1e-9) continue;
      EXPECT_EQ(f.contains(x), margin > 0.0);
    }
  }
  const Zonotope flat(Vector::Zero(2), Matrix{{1.0}, {1.0}});
  EXPECT_FALSE(zonotope_facets(flat).full_dimensional);
}

TEST(VolumeReport, MonteCarloRatios) {
  Rng rng(1);
  const IntervalBox box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  EXPECT_DOUBLE_EQ(relative_volume_mc(Zonotope::from_box(box), box, 5000, rng), 1.0);
  EXPECT_DOUBLE_EQ(relative_volume_mc(Zonotope::point(Vector::Zero(2)), box, 5000, rng), 0.0);
  const Zonotope quarter(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
  EXPECT_NEAR(relative_volume_mc(quarter, box, 40000, rng), 0.25, 0.01);
}

TEST(VolumeReport, FullActionSetIsOne) {
  VolumeSampleSpec spec;
  spec.states = 20;
  spec.samples_per_state = 500;
  spec.full_action_set = true;
  const VolumeReport r = volume_report(EnvKind::seeker, spec);
  EXPECT_EQ(r.rows.size(), 20u);
  EXPECT_DOUBLE_EQ(r.mean, 1.0);
}

TEST(VolumeReport, SeekerSetsAreProperSubsets) {
  VolumeSampleSpec spec;
  spec.states = 30;
  spec.samples_per_state = 2000;
  spec.seed = 4;
  const VolumeReport a = volume_report(EnvKind::seeker, spec);
  const VolumeReport b = volume_report(EnvKind::seeker, spec);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_GT(a.mean, 0.3);
  EXPECT_LT(a.mean, 1.0);
}

TEST(Experiment, ThreadBudget) {
  unsetenv("MASKRL_THREADS");
  EXPECT_EQ(thread_budget(3), 3);
  setenv("MASKRL_THREADS", "2", 1);
  EXPECT_EQ(thread_budget(3), 2);
  setenv("MASKRL_THREADS", "zero", 1);
  EXPECT_EQ(thread_budget(3), 3);
  unsetenv("MASKRL_THREADS");
}

TEST(Experiment, SmokeCampaignIsReproducible) {
  const fs::path out = scratch_dir("smoke");
  ExperimentSpec spec = parse_experiment(
      "env = seeker\nmasks = none, ray\nseeds = 0, 1\ntotal_steps = 20000\neval_episodes = 2\n");
  spec.output_dir = out / "first";
  const ExperimentResult first = run_experiment(spec, 2);
  ASSERT_TRUE(first.all_ok());
  ASSERT_EQ(first.runs.size(), 4u);

  std::set<std::string> dirs;
  for (const RunRecord& r : first.runs) {
    dirs.insert(r.directory);
    const fs::path d = spec.output_dir / r.directory;
    for (const char* f : {"config.json", "metrics.csv", "eval.json", "telemetry.json"})
      EXPECT_TRUE(fs::exists(d / f)) << d / f;
    EXPECT_TRUE(fs::exists(d / "checkpoint" / "params.bin"));
    const std::string csv = read_file(d / "metrics.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kMetricsHeader);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 20000 / 2048);
    EXPECT_EQ(r.collisions == 0 || r.mask == MaskKind::none, true);
  }
  EXPECT_EQ(dirs, (std::set<std::string>{"none/seed_0", "none/seed_1", "ray/seed_0", "ray/seed_1"}));

  const Manifest m = load_manifest(spec.output_dir);
  EXPECT_EQ(m.schema_version, kManifestSchemaVersion);
  EXPECT_EQ(m.env, EnvKind::seeker);
  ASSERT_EQ(m.runs.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.runs[i].directory, first.runs[i].directory);
    EXPECT_EQ(m.runs[i].steps, first.runs[i].steps);
    EXPECT_DOUBLE_EQ(m.runs[i].eval_mean, first.runs[i].eval_mean);
  }

  spec.output_dir = out / "second";
  const ExperimentResult second = run_experiment(spec, 1);
  ASSERT_TRUE(second.all_ok());
  for (const RunRecord& r : first.runs) {
    EXPECT_EQ(read_file(out / "first" / r.directory / "metrics.csv"),
              read_file(out / "second" / r.directory / "metrics.csv"))
        << r.directory;
    EXPECT_EQ(read_file(out / "first" / r.directory / "checkpoint" / "params.bin"),
              read_file(out / "second" / r.directory / "checkpoint" / "params.bin"));
  }
}

TEST(Experiment, FailedRunIsRecorded) {
  const fs::path out = scratch_dir("failure");
  TrainConfig c = default_config(EnvKind::seeker, MaskKind::none);
  c.total_steps = 64;
  c.clip_range = 7.0;
  const RunRecord r = run_single(c, out);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.error.empty());
  EXPECT_TRUE(fs::exists(out / "error.txt"));
}

TEST(Experiment, ManifestRejectsMissingRuns) {
  const fs::path out = scratch_dir("manifest");
  fs::create_directories(out);
  ExperimentSpec spec;
  RunRecord r;
  r.directory = "none/seed_0";
  r.ok = true;
  std::ofstream(out / "manifest.json") << manifest_json(spec, {r}).dump(2);
  EXPECT_THROW(load_manifest(out), std::runtime_error);
  fs::create_directories(out / "none" / "seed_0");
  EXPECT_NO_THROW(load_manifest(out));
}
