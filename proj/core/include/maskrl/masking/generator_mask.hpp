#pragma once

#include <maskrl/geometry/zonotope.hpp>
#include <maskrl/masking/gaussian.hpp>

namespace maskrl {

/// Added to GΣGᵀ when it is numerically singular.
inline constexpr double kCovarianceJitter = 1e-9;

/// c + G·clamp(β, -1, 1); `clamped` reports whether any component moved.
Vector generator_action(const Vector& beta, const Zonotope& relevant, bool* clamped = nullptr);

/// log N(a^r; Gμ + c, GΣGᵀ) for the latent Gaussian N(μ, Σ), jittered if singular.
double generator_log_prob(const Vector& ar, const DiagGaussian& latent, const Zonotope& relevant);

struct GeneratorScore {
  /// Gᵀ(GΣGᵀ)⁻¹(a^r - c - Gμ)
  Vector mean;
  /// ½ Gᵀ[(GΣGᵀ)⁻¹ d dᵀ (GΣGᵀ)⁻¹ - (GΣGᵀ)⁻¹]G with d = a^r - c - Gμ
  Matrix sigma;
  /// Chain rule through Σ = diag(exp(2·log_std)).
  Vector log_std;
};

GeneratorScore generator_score(const Vector& ar, const DiagGaussian& latent, const Zonotope& relevant);

}  // namespace maskrl
