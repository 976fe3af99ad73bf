#include <maskrl/relevant/relevant_sets.hpp>

#include <stdexcept>

namespace maskrl {

const char* to_string(RelevantSetSource source) {
  switch (source) {
    case RelevantSetSource::optimal:
      return "optimal";
    case RelevantSetSource::shifted_previous:
      return "shifted_previous";
    case RelevantSetSource::point:
      return "point";
    case RelevantSetSource::fixed:
      return "fixed";
  }
  return "unknown";
}

Matrix seeker_template() {
  Matrix g(2, 4);
  g << 1, 1, 1, 0, 1, -1, 0, 1;
  return g;
}

Matrix quad2d_template() {
  Matrix g(2, 3);
  g << 1, 1, 1, 1, -1, 0;
  return g;
}

Matrix quad3d_template() { return Matrix::Identity(4, 4); }

Halfspace obstacle_halfspace(const Vector& agent, const Vector& obstacle, double radius) {
  const Vector gap = obstacle - agent;
  const double dist = gap.norm();
  if (!(dist > radius)) throw std::domain_error("obstacle_halfspace: agent is inside the obstacle");
  const Vector n = gap / dist;
  return Halfspace(n, n.dot(obstacle - n * radius));
}

ScalingProgram seeker_program(const SeekerRequest& req) {
  if (req.agent.size() != 2 || req.obstacle.size() != 2) throw std::invalid_argument("seeker_program: positions must be 2D");
  if (req.agent.cwiseAbs().maxCoeff() >= req.bound)
    throw std::domain_error("seeker_program: agent is not strictly inside the state bounds");
  const Matrix g = req.template_generators.size() > 0 ? req.template_generators : seeker_template();
  ScalingProgram program(g);
  add_containment(program, program.relevant_set(), Zonotope::from_box(req.action_box));

  AffineZonotope next{req.agent, req.dt * Matrix::Identity(2, 2), Matrix(2, 0), req.dt * g};
  const double limit = req.bound - req.margin;
  add_containment(program, next, Zonotope(Vector::Zero(2), limit * Matrix::Identity(2, 2)));
  if (req.include_obstacle) {
    const Halfspace h = obstacle_halfspace(req.agent, req.obstacle, req.obstacle_radius);
    add_support_bound(program, next, h.normal, h.offset - req.margin);
  }
  return program;
}

RelevantSetResult solve_with_fallback(const ScalingProgram& program, const std::optional<Vector>& previous_scalings,
                                      const IntervalBox& actions) {
  RelevantSetResult out;
  const Index n = program.dim();
  std::optional<ScalingSolution> sol;
  try {
    sol = solve_geometric_mean(program);
  } catch (const ConvergenceError&) {
    sol.reset();
  }
  if (sol && sol->optimal()) {
    out.set = sol->zonotope(program.template_generators());
    out.scalings = sol->scalings;
    out.source = RelevantSetSource::optimal;
    out.kkt_residual = sol->kkt_residual;
    return out;
  }

  out.fallback = true;
  if (previous_scalings && previous_scalings->size() == program.num_scalings()) {
    const auto shifted = max_slack_point(program, *previous_scalings);
    if (shifted && shifted->slack >= 0.0) {
      out.scalings = *previous_scalings;
      out.set = Zonotope(shifted->variables.head(n), program.template_generators() * out.scalings.asDiagonal());
      out.source = RelevantSetSource::shifted_previous;
      return out;
    }
  }
  out.scalings = Vector::Zero(program.num_scalings());
  const auto point = max_slack_point(program, out.scalings);
  out.certified = point && point->slack >= 0.0;
  const Vector center = out.certified ? Vector(point->variables.head(n))
                                      : actions.clamp(point ? Vector(point->variables.head(n)) : actions.center());
  out.set = Zonotope(center, Matrix::Zero(n, program.num_scalings()));
  out.source = RelevantSetSource::point;
  return out;
}

RelevantSetResult seeker_relevant_set(const SeekerRequest& req) {
  return solve_with_fallback(seeker_program(req), req.previous_scalings, req.action_box);
}

ScalingProgram template_program(const TemplateRequest& req, const LinearizedStep& lin) {
  const Index ns = req.state.size();
  if (lin.a_d.rows() != ns || req.relevant_states.dim() != ns || lin.w_prime.dim() != ns)
    throw std::invalid_argument("template_program: state dimension mismatch");
  if (lin.b_d.cols() != req.action_box.dim() || req.template_generators.rows() != req.action_box.dim())
    throw std::invalid_argument("template_program: action dimension mismatch");
  ScalingProgram program(req.template_generators);
  add_containment(program, program.relevant_set(), Zonotope::from_box(req.action_box));
  AffineZonotope reach{lin.a_d * req.state + lin.w_prime.center(), lin.b_d, lin.w_prime.generators(),
                       lin.b_d * req.template_generators};
  add_containment(program, reach, req.relevant_states);
  return program;
}

RelevantSetResult template_relevant_set(const TemplateRequest& req, const LinearizedStep& lin) {
  return solve_with_fallback(template_program(req, lin), req.previous_scalings, req.action_box);
}

Zonotope static_norm_ball_set(double alpha, int dim, int num_generators) {
  return ball_underapprox(dim, num_generators, alpha);
}

}  // namespace maskrl
