#include <maskrl/relevant/providers.hpp>

#include <maskrl/envs/quadrotor.hpp>
#include <maskrl/envs/seeker.hpp>

#include <stdexcept>

namespace maskrl {

SeekerProvider::SeekerProvider(Matrix template_generators, double margin)
    : template_(std::move(template_generators)), margin_(margin) {}

RelevantSetResult SeekerProvider::compute(const Environment& env) {
  const auto* seeker = dynamic_cast<const SeekerEnv*>(&env);
  if (!seeker) throw std::invalid_argument("SeekerProvider: environment is not a Seeker");
  SeekerRequest req;
  req.agent = seeker->state();
  req.obstacle = seeker->obstacle();
  req.obstacle_radius = seeker->obstacle_radius();
  req.bound = seeker->config().bound;
  req.dt = seeker->dt();
  req.action_box = seeker->action_box();
  req.template_generators = template_;
  req.margin = margin_;
  req.previous_scalings = previous_;
  RelevantSetResult out = seeker_relevant_set(req);
  if (out.source != RelevantSetSource::point) previous_ = out.scalings;
  return out;
}

namespace {

Zonotope scaled_state_box(const IntervalBox& box, double scale) {
  return Zonotope(box.center(), (scale * box.radius()).asDiagonal().toDenseMatrix());
}

}  // namespace

TemplateProvider::TemplateProvider(EnvKind kind, TemplateProviderConfig config) : kind_(kind), config_(std::move(config)) {
  IntervalBox state_box;
  switch (kind) {
    case EnvKind::quad2d:
      template_ = quad2d_template();
      state_box = quad2d_state_box();
      break;
    case EnvKind::quad3d:
      template_ = quad3d_template();
      state_box = quad3d_state_box();
      break;
    default:
      throw std::invalid_argument("TemplateProvider: only quadrotor environments use the template program");
  }
  if (config_.relevant_states) {
    if (config_.relevant_states->dim() != state_box.dim())
      throw std::invalid_argument("TemplateProvider: relevant state set has the wrong dimension");
    relevant_states_ = *config_.relevant_states;
  } else {
    if (!(config_.relevant_state_scale > 0.0 && config_.relevant_state_scale <= 1.0))
      throw std::invalid_argument("TemplateProvider: relevant state scale must lie in (0, 1]");
    relevant_states_ = scaled_state_box(state_box, config_.relevant_state_scale);
  }
}

RelevantSetResult TemplateProvider::compute(const Environment& env) {
  const auto* quad = dynamic_cast<const QuadrotorEnv*>(&env);
  if (!quad || quad->kind() != kind_) throw std::invalid_argument("TemplateProvider: environment kind mismatch");
  const LinearizedStep lin = linearize_step(quad->dynamics(), quad->state(), quad->action_box().center(), quad->dt(),
                                            quad->disturbance_set(), config_.eps_lin);
  TemplateRequest req{quad->state(), quad->action_box(), relevant_states_, template_, previous_};
  RelevantSetResult out = template_relevant_set(req, lin);
  if (out.source != RelevantSetSource::point) previous_ = out.scalings;
  return out;
}

RelevantSetResult StaticProvider::compute(const Environment& env) {
  if (env.action_dim() != set_.dim()) throw std::invalid_argument("StaticProvider: action dimension mismatch");
  RelevantSetResult out;
  out.set = set_;
  out.source = RelevantSetSource::fixed;
  return out;
}

std::unique_ptr<RelevantSetProvider> make_provider(EnvKind kind, const TemplateProviderConfig& config) {
  if (kind == EnvKind::seeker) return std::make_unique<SeekerProvider>();
  return std::make_unique<TemplateProvider>(kind, config);
}

std::unique_ptr<RelevantSetProvider> make_full_action_provider(const Environment& env) {
  return std::make_unique<StaticProvider>(Zonotope::from_box(env.action_box()));
}

StateSetValidation validate_relevant_states(const TemplateProvider& provider, const Environment& env, int samples,
                                            Rng& rng) {
  const auto* quad = dynamic_cast<const QuadrotorEnv*>(&env);
  if (!quad) throw std::invalid_argument("validate_relevant_states: not a quadrotor environment");
  const IntervalBox hull = interval_hull(provider.relevant_states());
  StateSetValidation out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.samples < samples) {
    Vector s(hull.dim());
    for (Index i = 0; i < s.size(); ++i) s(i) = hull.lower()(i) + (hull.upper()(i) - hull.lower()(i)) * unit(rng);
    if (!contains_point(provider.relevant_states(), s)) continue;
    ++out.samples;
    const LinearizedStep lin = linearize_step(quad->dynamics(), s, quad->action_box().center(), quad->dt(),
                                              quad->disturbance_set(), provider.eps_lin());
    const TemplateRequest req{s, quad->action_box(), provider.relevant_states(), provider.template_generators(), {}};
    try {
      if (solve_geometric_mean(template_program(req, lin)).optimal()) ++out.feasible;
    } catch (const ConvergenceError&) {
    }
  }
  return out;
}

}  // namespace maskrl
