#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace maskrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Every stochastic routine takes its generator explicitly; nothing in the
/// library owns a global RNG.
using Rng = std::mt19937_64;

}  // namespace maskrl
