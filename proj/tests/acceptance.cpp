// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance            run all
//   acceptance --only 7   run one
//
// Exit status is 0 only if every requested criterion passes.

#include "oracles.hpp"

#include <maskrl/convex/scaling_program.hpp>
#include <maskrl/harness/bootstrap.hpp>
#include <maskrl/harness/experiment.hpp>
#include <maskrl/harness/volume_report.hpp>
#include <maskrl/masking/cubature.hpp>
#include <maskrl/masking/generator_mask.hpp>
#include <maskrl/masking/hit_and_run.hpp>
#include <maskrl/masking/ray_mask.hpp>
#include <maskrl/relevant/relevant_sets.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

using namespace maskrl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Uniform entries in [-1, 1], redrawn until the smallest singular value reaches `min_sv`.
Matrix random_generators(Rng& rng, Index n, Index p, double min_sv) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    Matrix g(n, p);
    for (Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
    if (Eigen::JacobiSVD<Matrix>(g).singularValues().minCoeff() >= min_sv) return g;
  }
}

DiagGaussian random_latent(Rng& rng, Index p) {
  std::normal_distribution<double> nd(0.0, 0.5);
  std::uniform_real_distribution<double> ls(-1.0, 0.5);
  DiagGaussian d{Vector(p), Vector(p)};
  for (Index i = 0; i < p; ++i) {
    d.mean(i) = nd(rng);
    d.log_std(i) = ls(rng);
  }
  return d;
}

/// A^r with interior center inside [-1, 1]^n.
Zonotope random_relevant(Rng& rng, Index n) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_int_distribution<int> extra(0, 2);
  const Index p = n + extra(rng);
  Vector c(n);
  for (Index i = 0; i < n; ++i) c(i) = u(rng);
  Matrix g = random_generators(rng, n, p, 0.05);
  const Vector reach = g.cwiseAbs().rowwise().sum();
  const Vector room = (Vector::Ones(n) - c.cwiseAbs());
  g *= 0.95 * (room.array() / reach.array()).minCoeff();
  return Zonotope(c, g);
}

Vector random_in_box(Rng& rng, Index n, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

// 1. Generator score against central differences of the generator log-density.
Outcome gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index p = 2 + k % 3;
    const Zonotope z(random_in_box(rng, 2, 0.3), random_generators(rng, 2, p, 0.2));
    const DiagGaussian lat = random_latent(rng, p);
    const Vector ar = z.center() + z.generators() * random_in_box(rng, p, 1.0);
    const GeneratorScore s = generator_score(ar, lat, z);
    Vector analytic(2 * p);
    analytic << s.mean, s.log_std;
    Vector theta(2 * p);
    theta << lat.mean, lat.log_std;
    const Vector fd = oracle::numeric_gradient(
        [&](const Vector& th) {
          return generator_log_prob(ar, DiagGaussian{th.head(p), th.tail(p)}, z);
        },
        theta, 1e-6);
    worst = std::max(worst, oracle::relative_error(analytic, fd));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-5 && secs < 10.0,
          fmt("100 cases, N=2, P in {2,3,4}: max rel err %.2e (< 1e-5), %.2f s (< 10 s)", worst, secs)};
}

// 2. Square invertible G: generator scores equal latent scores at β = G⁻¹(a^r − c).
Outcome prop5_consistency() {
  Rng rng(202);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 3;
    const Zonotope z(random_in_box(rng, n, 0.3), random_generators(rng, n, n, 0.2));
    const DiagGaussian lat = random_latent(rng, n);
    const Vector ar = z.center() + z.generators() * random_in_box(rng, n, 1.0);
    const Vector beta = z.generators().lu().solve(ar - z.center());
    const GeneratorScore s = generator_score(ar, lat, z);
    worst = std::max(worst, (s.mean - lat.score_mean(beta)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (s.log_std - lat.score_log_std(beta)).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-9, fmt("100 random invertible G, N in {2,3,4}: max abs diff %.2e (< 1e-9)", worst)};
}

// 3. ray_unmap(ray_map(a)) = a and mapped actions lie in A^r.
Outcome ray_bijectivity() {
  Rng rng(303);
  double worst = 0.0;
  long outside = 0;
  long total = 0;
  for (Index n : {2, 4}) {
    const IntervalBox box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
    for (int k = 0; k < 10000; ++k) {
      const Zonotope ar_set = random_relevant(rng, n);
      const Vector a = random_in_box(rng, n, 1.0);
      const Vector ar = ray_map(a, ar_set, box).point;
      worst = std::max(worst, (ray_unmap(ar, ar_set, box) - a).cwiseAbs().maxCoeff());
      outside += !contains_point(ar_set, ar, 1e-8);
      ++total;
    }
  }
  return {worst < 1e-9 && outside == 0,
          fmt("%ld pairs in 2D and 4D: max round-trip err %.2e (< 1e-9), %ld outside A^r at tol 1e-8", total, worst,
              outside)};
}

// 4. Hit-and-run against exact marginals.
Outcome hit_and_run_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(404);
  // truncated normal on [-1, 1]
  const Zonotope seg(Vector::Zero(1), Matrix::Identity(1, 1));
  const double mu = 0.3;
  const double sd = 0.5;
  const DiagGaussian d{Vector{{mu}}, Vector{{std::log(sd)}}};
  const LogDensity ld = [&](const Vector& x) { return d.log_prob(x); };
  std::vector<double> xs;
  bool inside = true;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = hit_and_run_sample(ld, seg, Vector::Zero(1), rng);
    inside = inside && std::abs(x(0)) <= 1.0;
    xs.push_back(x(0));
  }
  const double lo = oracle::normal_cdf((-1.0 - mu) / sd);
  const double hi = oracle::normal_cdf((1.0 - mu) / sd);
  const double ks1 = oracle::ks_statistic(xs, [&](double v) { return (oracle::normal_cdf((v - mu) / sd) - lo) / (hi - lo); });

  // uniform over a 2D zonotope with three generators
  const Zonotope z(Vector{{0.1, -0.1}}, Matrix{{0.5, 0.3, -0.2}, {0.1, 0.4, 0.35}});
  const auto poly = oracle::zonotope_polygon(z.center(), z.generators());
  HitAndRunChain chain(z, z.center());
  for (int i = 0; i < 200; ++i) chain.step(rng);
  std::vector<double> px;
  std::vector<double> py;
  for (int i = 0; i < 10000; ++i) {
    const Vector& x = chain.sample(rng);
    inside = inside && contains_point(z, x, 1e-9);
    px.push_back(x(0));
    py.push_back(x(1));
  }
  const double ksx = oracle::ks_statistic(px, [&](double v) { return oracle::uniform_marginal_cdf(poly, 0, v); });
  const double ksy = oracle::ks_statistic(py, [&](double v) { return oracle::uniform_marginal_cdf(poly, 1, v); });
  const double secs = seconds_since(t0);
  return {ks1 < 0.02 && ksx < 0.03 && ksy < 0.03 && inside && secs < 60.0,
          fmt("1D truncated normal KS %.4f (< 0.02); 2D zonotope KS x %.4f, y %.4f (< 0.03); all inside: %s; %.1f s "
              "(< 60 s)",
              ks1, ksx, ksy, inside ? "yes" : "no", secs)};
}

// 5. Cubature against closed forms.
Outcome cubature_accuracy() {
  const DiagGaussian d{Vector::Zero(2), Vector::Zero(2)};
  const CubatureResult g = cubature_integral([&](const Vector& x) { return d.log_prob(x); },
                                             Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  const double exact = std::pow(std::erf(1.0 / std::sqrt(2.0)), 2);
  const Zonotope hex(Vector::Zero(2), Matrix{{1.0, 0.5, -0.5}, {0.0, std::sqrt(3.0) / 2.0, std::sqrt(3.0) / 2.0}});
  const double area = cubature_integral([](const Vector&) { return 0.0; }, hex).value;
  const double shoelace = oracle::shoelace_area(oracle::zonotope_polygon(hex.center(), hex.generators()));
  const double gerr = std::abs(g.value - exact);
  const double aerr = std::abs(area - shoelace) / shoelace;
  return {gerr < 1e-3 && aerr < 1e-3,
          fmt("Gaussian mass over [-1,1]^2 err %.2e (< 1e-3); hexagon area rel err %.2e (< 1e-3)", gerr, aerr)};
}

// 6. Membership and boundary programs against polygon oracles.
Outcome lp_oracles() {
  Rng rng(606);
  std::uniform_int_distribution<int> gens(2, 5);
  std::normal_distribution<double> nd;
  int disagree = 0;
  int ambiguous = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Zonotope z(random_in_box(rng, 2, 0.5), random_generators(rng, 2, gens(rng), 0.05));
    const auto poly = oracle::zonotope_polygon(z.center(), z.generators());
    const Vector x = random_in_box(rng, 2, 3.0);
    const double margin = oracle::polygon_margin(poly, x);
    if (std::abs(margin) < 1e-9)
      ++ambiguous;
    else
      disagree += contains_point(z, x) != (margin > 0.0);

    const Vector start = z.center() + z.generators() * random_in_box(rng, z.num_generators(), 0.9);
    Vector dir{{nd(rng), nd(rng)}};
    const BoundaryPoint bp = boundary_point(z, start, dir);
    const double t = oracle::polygon_ray_exit(poly, start, dir);
    worst = std::max(worst, (bp.point - (start + t * dir)).cwiseAbs().maxCoeff());
  }
  return {disagree == 0 && ambiguous == 0 && worst < 1e-6,
          fmt("1000 instances: %d membership disagreements, %d within 1e-9 of the boundary; max boundary err %.2e "
              "(< 1e-6)",
              disagree, ambiguous, worst)};
}

// 7. Geometric-mean program.
Outcome geometric_mean_program() {
  // Seeker template, c = 0, only A^r ⊆ [-1, 1]². Rows of |G̃ diag p| give
  // p1 + p2 + p3 <= 1 and p1 + p2 + p4 <= 1; grid search over that polytope.
  double best = -1e300;
  Vector grid(4);
  const int steps = 400;
  for (int i = 1; i < steps; ++i)
    for (int j = 1; i + j < steps; ++j) {
      const double p1 = static_cast<double>(i) / steps;
      const double p2 = static_cast<double>(j) / steps;
      const double rest = 1.0 - p1 - p2;
      const double v = std::log(p1) + std::log(p2) + 2.0 * std::log(rest);
      if (v > best) {
        best = v;
        grid << p1, p2, rest, rest;
      }
    }
  ScalingProgram box_case(seeker_template());
  box_case.fix_center(Vector::Zero(2));
  add_containment(box_case, box_case.relevant_set(),
                  Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  const ScalingSolution sol = solve_geometric_mean(box_case);
  const double box_err = sol.optimal() ? (sol.scalings - grid).cwiseAbs().maxCoeff() : 1e300;
  const Vector thirds = Vector::Constant(4, 1.0 / 3.0);
  const double thirds_gap = sol.optimal() ? (sol.scalings - thirds).cwiseAbs().maxCoeff() : 1e300;

  // random two-generator programs: a1 p1 + b1 p2 <= 1, a2 p1 + b2 p2 <= 1
  Rng rng(707);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    ScalingProgram program(Matrix::Identity(2, 2));
    program.fix_center(Vector::Zero(2));
    Vector r1 = Vector::Zero(program.num_variables());
    r1(2) = a1;
    r1(3) = b1;
    Vector r2 = Vector::Zero(program.num_variables());
    r2(2) = a2;
    r2(3) = b2;
    program.add_inequality(r1, 1.0);
    program.add_inequality(r2, 1.0);
    const ScalingSolution s = solve_geometric_mean(program);
    if (!s.optimal()) {
      worst = 1e300;
      continue;
    }
    double gbest = -1e300;
    Vector arg(2);
    const int n = 4000;
    const double hi1 = std::min(1.0 / a1, 1.0 / a2);
    for (int i = 1; i < n; ++i) {
      const double p1 = hi1 * i / n;
      const double p2 = std::min((1.0 - a1 * p1) / b1, (1.0 - a2 * p1) / b2);
      if (p2 <= 0.0) continue;
      const double v = std::log(p1) + std::log(p2);
      if (v > gbest) {
        gbest = v;
        arg << p1, p2;
      }
    }
    worst = std::max(worst, (s.scalings - arg).cwiseAbs().maxCoeff());
  }
  return {box_err < 1e-3 && worst < 1e-3,
          fmt("box case p = [%.4f %.4f %.4f %.4f], grid oracle err %.2e (< 1e-3); distance to [1/3]*4 is %.3f "
              "(Σlog %.4f vs %.4f for 1/3, which is not optimal); 100 random programs max err %.2e (< 1e-3)",
              sol.scalings(0), sol.scalings(1), sol.scalings(2), sol.scalings(3), box_err, thirds_gap,
              sol.scalings.array().log().sum(), 4.0 * std::log(1.0 / 3.0), worst)};
}

// 8. Masked Seeker rollouts: no fallback, no collision.
Outcome safety_guarantee() {
  std::string detail;
  bool pass = true;
  for (MaskKind mask : {MaskKind::replacement, MaskKind::ray, MaskKind::generator, MaskKind::distributional}) {
    TrainConfig c = default_config(EnvKind::seeker, mask);
    c.seed = 808;
    auto env = make_training_environment(c);
    auto provider = make_training_provider(c, *env);
    const MaskedPolicy policy = make_masked_policy(c, *env);
    ActorCritic model(network_shape(c, *env, policy));
    Rng init = stream_rng(c.seed, 3);
    model.initialize(init, c.log_std_init);
    RolloutCollector collector(std::move(env), std::move(provider), policy, c.seed);
    for (int chunk = 0; chunk < 10; ++chunk) collector.collect(model, 1000, c.gamma);
    const RolloutTelemetry& t = collector.telemetry();
    const bool ok = (t.fallbacks > 0 || t.collisions == 0) && t.membership_violations == 0;
    pass = pass && ok;
    detail += fmt("%s: %ld steps, %ld episodes, %ld fallbacks, %ld collisions, %ld membership violations; ",
                  to_string(mask), t.steps, t.episodes, t.fallbacks, t.collisions, t.membership_violations);
  }
  return {pass, detail + "zero fallbacks must imply zero collisions"};
}

// 9. Relative-volume telemetry.
Outcome relative_volume() {
  VolumeSampleSpec spec;
  spec.states = 200;
  spec.samples_per_state = 10000;
  spec.seed = 909;
  const VolumeReport seeker = volume_report(EnvKind::seeker, spec);

  // unit 2-norm ball in [-1, 1]^6
  Rng rng(910);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int samples = 1000000;
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    double r2 = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double x = u(rng);
      r2 += x * x;
    }
    hits += r2 <= 1.0;
  }
  const double ball = static_cast<double>(hits) / samples;

  // the 36-generator zonotope standing in for the ball, measured by the same sampler
  const Zonotope z = static_norm_ball_set(1.0, 6, 36);
  const IntervalBox box(Vector::Constant(6, -1.0), Vector::Constant(6, 1.0));
  const double zono = relative_volume_mc(z, box, 20000, rng);

  const bool pass = seeker.mean >= 0.60 && seeker.mean <= 0.80 && ball >= 0.07 && ball <= 0.09;
  return {pass, fmt("Seeker mean relative volume %.4f over %zu states (%d fallbacks) in [0.60, 0.80]; 6D ball/box "
                    "%.4f in [0.07, 0.09] (exact %.4f); 36-generator zonotope/box %.4f",
                    seeker.mean, seeker.rows.size(), seeker.fallbacks, ball,
                    std::pow(std::numbers::pi, 3) / 6.0 / 64.0, zono)};
}

// 10. Desk-scale learning ordering on Seeker.
Outcome learning_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out = fs::temp_directory_path() / "maskrl_acceptance_ordering";
  fs::remove_all(out);
  ExperimentSpec spec;
  spec.env = EnvKind::seeker;
  spec.masks = {MaskKind::none, MaskKind::replacement, MaskKind::ray, MaskKind::generator, MaskKind::distributional};
  spec.seeds = {0, 1, 2, 3, 4};
  spec.total_steps = 100000;
  spec.eval_episodes = 10;
  spec.output_dir = out;
  const int threads = thread_budget(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  const ExperimentResult result = run_experiment(spec, threads);
  if (!result.all_ok()) {
    for (const RunRecord& r : result.runs)
      if (!r.ok) return {false, fmt("run %s failed: %s", r.directory.c_str(), r.error.c_str())};
  }

  // per mask: seed-averaged mean of the rows in the first and in the last 10% of training
  std::map<MaskKind, std::pair<double, double>> summary;
  for (MaskKind mask : spec.masks) {
    std::vector<fs::path> files;
    for (std::uint64_t seed : spec.seeds) files.push_back(out / run_directory(mask, seed) / "metrics.csv");
    const MetricSeries s = load_return_series(files);
    double early = 0.0;
    double late = 0.0;
    int ne = 0;
    int nl = 0;
    for (size_t i = 0; i < s.steps.size(); ++i)
      for (const auto& seed_values : s.values) {
        if (s.steps[i] <= spec.total_steps / 10) {
          early += seed_values[i];
          ++ne;
        }
        if (s.steps[i] > spec.total_steps - spec.total_steps / 10) {
          late += seed_values[i];
          ++nl;
        }
      }
    summary[mask] = {ne ? early / ne : std::nan(""), nl ? late / nl : std::nan("")};
  }
  bool pass = true;
  std::string detail;
  const auto [base_early, base_late] = summary[MaskKind::none];
  for (MaskKind mask : spec.masks) {
    const auto [early, late] = summary[mask];
    if (mask != MaskKind::none) pass = pass && late > base_late && early > base_early;
    detail += fmt("%s first10%% %.1f final10%% %.1f; ", to_string(mask), early, late);
  }
  detail += fmt("every mask must beat none on both; %.0f s", seconds_since(t0));
  return {pass, detail};
}

// 11. ray with A^r = A reproduces none bit for bit.
Outcome ppo_regression() {
  int identical = 0;
  for (std::uint64_t seed : {0, 1, 2}) {
    TrainConfig none = default_config(EnvKind::seeker, MaskKind::none);
    none.seed = seed;
    none.total_steps = 20000;
    TrainConfig ray = none;
    ray.mask = MaskKind::ray;
    ray.full_action_set = true;
    Trainer a(none);
    Trainer b(ray);
    const TrainResult ra = a.run();
    const TrainResult rb = b.run();
    bool same = ra.metrics.size() == rb.metrics.size() && a.model().params() == b.model().params();
    for (size_t i = 0; same && i < ra.metrics.size(); ++i)
      same = metrics_csv_line(ra.metrics[i]) == metrics_csv_line(rb.metrics[i]);
    identical += same;
  }
  return {identical == 3, fmt("%d/3 seeds with bit-identical metrics and parameters over 2e4 steps", identical)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {1, "gradient fidelity", gradient_fidelity},
      {2, "latent score consistency", prop5_consistency},
      {3, "ray bijectivity", ray_bijectivity},
      {4, "hit-and-run", hit_and_run_correctness},
      {5, "cubature", cubature_accuracy},
      {6, "membership and boundary programs", lp_oracles},
      {7, "geometric-mean program", geometric_mean_program},
      {8, "safety guarantee", safety_guarantee},
      {9, "relative volume", relative_volume},
      {10, "learning ordering", learning_ordering},
      {11, "ppo regression", ppo_regression},
  };
  bool all = true;
  int ran = 0;
  for (const Criterion& c : criteria) {
    if (only && c.id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %2d %-34s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
