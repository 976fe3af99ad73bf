#include <maskrl/convex/linear_program.hpp>
#include <maskrl/envs/quadrotor.hpp>
#include <maskrl/geometry/zonotope.hpp>
#include <maskrl/masking/cubature.hpp>
#include <maskrl/masking/generator_mask.hpp>
#include <maskrl/masking/hit_and_run.hpp>
#include <maskrl/masking/ray_mask.hpp>
#include <maskrl/relevant/providers.hpp>
#include <maskrl/relevant/relevant_sets.hpp>

#include <benchmark/benchmark.h>

using namespace maskrl;

namespace {

Zonotope seeker_like() { return Zonotope(Vector{{0.1, -0.05}}, seeker_template() * Vector{{0.25, 0.25, 0.5, 0.5}}.asDiagonal()); }

IntervalBox unit_box(Index n) { return IntervalBox(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

void BM_SeekerRelevantSet(benchmark::State& state) {
  SeekerRequest req;
  req.agent = Vector{{2.0, 1.0}};
  req.obstacle = Vector{{3.0, 1.5}};
  for (auto _ : state) benchmark::DoNotOptimize(seeker_relevant_set(req));
}
BENCHMARK(BM_SeekerRelevantSet);

void BM_ProviderCompute(benchmark::State& state) {
  const auto kind = static_cast<EnvKind>(state.range(0));
  auto env = make_environment(kind);
  auto provider = make_provider(kind);
  Rng rng(1);
  env->reset(rng);
  for (auto _ : state) benchmark::DoNotOptimize(provider->compute(*env));
}
BENCHMARK(BM_ProviderCompute)->Arg(static_cast<int>(EnvKind::seeker))->Arg(static_cast<int>(EnvKind::quad2d))->Arg(static_cast<int>(EnvKind::quad3d));

void BM_SimplexBoundaryLp(benchmark::State& state) {
  const Index n = state.range(0);
  const Index p = 2 * n;
  Rng rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix g(n, p);
  for (Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
  const Zonotope z(Vector::Zero(n), g);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(boundary_point(z, Vector::Zero(n), d));
}
BENCHMARK(BM_SimplexBoundaryLp)->Arg(2)->Arg(4)->Arg(6);

void BM_RayMap(benchmark::State& state) {
  const Zonotope z = seeker_like();
  const IntervalBox box = unit_box(2);
  const Vector a{{0.7, -0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(ray_map(a, z, box));
}
BENCHMARK(BM_RayMap);

void BM_GeneratorScore(benchmark::State& state) {
  const Zonotope z = seeker_like();
  const DiagGaussian latent{Vector{{0.1, 0.2, -0.3, 0.0}}, Vector::Constant(4, -0.5)};
  const Vector ar{{0.2, 0.1}};
  for (auto _ : state) benchmark::DoNotOptimize(generator_score(ar, latent, z));
}
BENCHMARK(BM_GeneratorScore);

void BM_Cubature(benchmark::State& state) {
  const Zonotope z = seeker_like();
  const DiagGaussian d{Vector{{0.3, -0.2}}, Vector::Constant(2, -0.7)};
  const LogDensity ld = [&](const Vector& x) { return d.log_prob(x); };
  for (auto _ : state) benchmark::DoNotOptimize(cubature_integral(ld, z));
}
BENCHMARK(BM_Cubature);

void BM_HitAndRunSample(benchmark::State& state) {
  const Zonotope z = seeker_like();
  const DiagGaussian d{Vector{{0.3, -0.2}}, Vector::Constant(2, -0.7)};
  const LogDensity ld = [&](const Vector& x) { return d.log_prob(x); };
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(hit_and_run_sample(ld, z, z.center(), rng));
}
BENCHMARK(BM_HitAndRunSample);

}  // namespace
BENCHMARK_MAIN();
