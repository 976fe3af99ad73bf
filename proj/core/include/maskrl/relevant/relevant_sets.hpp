#pragma once

#include <maskrl/convex/scaling_program.hpp>
#include <maskrl/relevant/linearize.hpp>

#include <optional>

namespace maskrl {

enum class RelevantSetSource {
  optimal,           ///< solution of the scaling program
  shifted_previous,  ///< previous scalings, re-centered by a max-slack LP
  point,             ///< degenerate set at the max-slack center
  fixed,             ///< static set, no program involved
};

const char* to_string(RelevantSetSource source);

struct RelevantSetResult {
  Zonotope set;
  /// p̃ for template-based sets; empty for static sets.
  Vector scalings;
  RelevantSetSource source = RelevantSetSource::fixed;
  /// Set whenever the program was infeasible or did not converge.
  bool fallback = false;
  /// False if even the fallback could not satisfy every constraint.
  bool certified = true;
  double kkt_residual = 0.0;

  bool is_fallback() const { return fallback; }
};

struct SeekerRequest {
  Vector agent;
  Vector obstacle;
  double obstacle_radius = 1.0;
  double bound = 10.0;
  double dt = 1.0;
  IntervalBox action_box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  Matrix template_generators;
  /// Pulled off the right-hand sides of the state constraints.
  double margin = 1e-8;
  std::optional<Vector> previous_scalings;
  bool include_obstacle = true;
};

Matrix seeker_template();
Matrix quad2d_template();
Matrix quad3d_template();

/// Tangent halfspace nᵀx <= b separating `agent` from the obstacle disk.
Halfspace obstacle_halfspace(const Vector& agent, const Vector& obstacle, double radius);

/// Constraints: A^r ⊆ A, s ⊕ Δt·A^r ⊆ [-bound, bound]², ρ(n) of s ⊕ Δt·A^r <= b.
ScalingProgram seeker_program(const SeekerRequest& req);
RelevantSetResult seeker_relevant_set(const SeekerRequest& req);

struct TemplateRequest {
  Vector state;
  IntervalBox action_box;
  Zonotope relevant_states;
  Matrix template_generators;
  std::optional<Vector> previous_scalings;
};

/// Constraints: A^r ⊆ A and ⟨A_d s + c_W', [B_d G̃ diag p̃, G_W']⟩ ⊕ B_d c ⊆ S^r.
ScalingProgram template_program(const TemplateRequest& req, const LinearizedStep& lin);
RelevantSetResult template_relevant_set(const TemplateRequest& req, const LinearizedStep& lin);

/// Solves `program` and falls back as described on RelevantSetSource. An
/// uncertified point is clamped into `actions` so it can still be executed.
RelevantSetResult solve_with_fallback(const ScalingProgram& program, const std::optional<Vector>& previous_scalings,
                                      const IntervalBox& actions);

/// Zonotope inside {a : ‖a‖₂ <= alpha}.
Zonotope static_norm_ball_set(double alpha, int dim, int num_generators);

}  // namespace maskrl
