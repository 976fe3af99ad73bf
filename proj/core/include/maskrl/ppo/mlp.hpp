#pragma once

#include <maskrl/types.hpp>

#include <string>
#include <vector>

namespace maskrl {

enum class Activation { relu, tanh };

const char* to_string(Activation activation);
Activation parse_activation(const std::string& name);

/// Fully connected network over a caller-owned flat parameter buffer.
/// Layer l stores W_l (out×in, column major) followed by b_l. The last layer
/// is linear. Inputs and outputs are batched column-wise.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<Index> sizes, Activation activation);

  Index input_dim() const { return sizes_.front(); }
  Index output_dim() const { return sizes_.back(); }
  Index num_params() const { return num_params_; }
  const std::vector<Index>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }

  /// Orthogonal weights scaled by `hidden_gain` (last layer: `output_gain`), zero biases.
  void initialize(double* params, Rng& rng, double hidden_gain, double output_gain) const;

  struct Cache {
    std::vector<Matrix> inputs;  ///< input to each layer
    std::vector<Matrix> pre;     ///< pre-activations of hidden layers
  };

  Matrix forward(const double* params, const Matrix& x, Cache* cache = nullptr) const;

  /// Adds ∂L/∂params to `grad` given ∂L/∂output; returns ∂L/∂input.
  Matrix backward(const double* params, const Cache& cache, const Matrix& grad_out, double* grad) const;

 private:
  std::vector<Index> sizes_;
  Activation activation_ = Activation::relu;
  Index num_params_ = 0;
};

/// Orthogonal matrix of the given shape (rows or columns orthonormal), times gain.
Matrix orthogonal_matrix(Index rows, Index cols, double gain, Rng& rng);

}  // namespace maskrl
