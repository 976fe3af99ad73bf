#pragma once

#include <maskrl/envs/environment.hpp>

namespace maskrl {

/// Discrete affine model s' = A_d s + B_d a + w', w' ∈ W'.
struct LinearizedStep {
  Matrix a_d;
  Matrix b_d;
  /// Discretized disturbance plus the affine remainder of the linearization,
  /// inflated by ⟨0, ε_lin I⟩.
  Zonotope w_prime;
  double dt = 0.0;
};

/// exp(M) by scaling and squaring of a degree-12 Taylor polynomial.
Matrix matrix_exponential(const Matrix& m);

/// Linearizes ṡ = f(s, a, w) at (s, a_mid, 0) and discretizes exactly:
/// exp of the augmented matrix [[J_s, J_a, J_w, r], 0] · Δt yields A_d, B_d,
/// the disturbance input matrix and the offset v = ∫exp(J_s τ)dτ · r with
/// r = f(s, a_mid, 0) - J_s s - J_a a_mid.
LinearizedStep linearize_step(const DynamicsModel& model, const Vector& s, const Vector& a_mid, double dt,
                              const Zonotope& disturbance, double eps_lin);

}  // namespace maskrl
