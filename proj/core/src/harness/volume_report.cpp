#include <maskrl/harness/volume_report.hpp>

#include <maskrl/envs/quadrotor.hpp>
#include <maskrl/masking/masked_policy.hpp>
#include <maskrl/relevant/providers.hpp>

#include <stdexcept>

namespace maskrl {

bool ZonotopeFacets::contains(const Vector& x, double tol) const {
  if (!full_dimensional) return false;
  return ((normals * x - offsets).array() <= tol * (1.0 + offsets.array().abs())).all();
}

ZonotopeFacets zonotope_facets(const Zonotope& z) {
  ZonotopeFacets out;
  const Index n = z.dim();
  const Index p = z.num_generators();
  const Matrix& g = z.generators();
  if (p < n || Eigen::FullPivLU<Matrix>(g).rank() < n) return out;
  out.full_dimensional = true;

  std::vector<Vector> normals;
  if (n == 1) {
    normals.push_back(Vector::Ones(1));
  } else {
    std::vector<Index> idx(static_cast<size_t>(n - 1));
    for (Index i = 0; i < n - 1; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
      Matrix sub(n, n - 1);
      for (Index k = 0; k < n - 1; ++k) sub.col(k) = g.col(idx[static_cast<size_t>(k)]);
      Eigen::FullPivLU<Matrix> lu(sub.transpose());
      if (lu.rank() == n - 1) {
        Vector normal = lu.kernel().col(0);
        normals.push_back(normal.normalized());
      }
      Index k = n - 2;
      while (k >= 0 && idx[static_cast<size_t>(k)] == p - (n - 1) + k) --k;
      if (k < 0) break;
      ++idx[static_cast<size_t>(k)];
      for (Index r = k + 1; r < n - 1; ++r) idx[static_cast<size_t>(r)] = idx[static_cast<size_t>(r - 1)] + 1;
    }
  }
  const Index m = static_cast<Index>(normals.size());
  out.normals.resize(2 * m, n);
  out.offsets.resize(2 * m);
  for (Index i = 0; i < m; ++i) {
    const Vector& l = normals[static_cast<size_t>(i)];
    const double spread = (g.transpose() * l).cwiseAbs().sum();
    const double lc = l.dot(z.center());
    out.normals.row(2 * i) = l.transpose();
    out.offsets(2 * i) = lc + spread;
    out.normals.row(2 * i + 1) = -l.transpose();
    out.offsets(2 * i + 1) = -lc + spread;
  }
  return out;
}

double relative_volume_mc(const Zonotope& relevant, const IntervalBox& box, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("relative_volume_mc: need samples");
  if (relevant.dim() != box.dim()) throw std::invalid_argument("relative_volume_mc: dimension mismatch");
  const ZonotopeFacets facets = zonotope_facets(relevant);
  if (!facets.full_dimensional) return 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(box.dim());
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    for (Index i = 0; i < box.dim(); ++i) x(i) = box.lower()(i) + unit(rng) * (box.upper()(i) - box.lower()(i));
    inside += facets.contains(x);
  }
  return static_cast<double>(inside) / samples;
}

VolumeReport volume_report(EnvKind kind, const VolumeSampleSpec& spec) {
  if (spec.states < 1) throw std::invalid_argument("volume_report: need at least one state");
  std::unique_ptr<Environment> env = make_environment(kind);
  std::unique_ptr<RelevantSetProvider> provider =
      spec.full_action_set ? make_full_action_provider(*env) : make_provider(kind);
  const ActionNormalizer normalizer(env->action_box());
  Rng env_rng(spec.seed);
  Rng policy_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  Rng mc_rng(spec.seed + 7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  VolumeReport report;
  env->reset(env_rng);
  provider->reset();
  double sum = 0.0;
  while (static_cast<int>(report.rows.size()) < spec.states) {
    const RelevantSetResult rs = provider->compute(*env);
    VolumeRow row;
    row.state = env->state();
    row.fallback = rs.fallback;
    row.relative_volume = relative_volume_mc(rs.set, env->action_box(), spec.samples_per_state, mc_rng);
    report.fallbacks += rs.fallback;
    sum += row.relative_volume;
    report.rows.push_back(std::move(row));

    Vector a(env->action_dim());
    for (Index i = 0; i < a.size(); ++i) a(i) = unit(policy_rng);
    const Vector executed = replacement_filter(a, normalizer.to_normalized(rs.set), policy_rng);
    const StepResult result = env->step(normalizer.to_env(executed), env_rng);
    if (result.done()) {
      env->reset(env_rng);
      provider->reset();
    }
  }
  report.mean = sum / static_cast<double>(report.rows.size());
  return report;
}

}  // namespace maskrl
