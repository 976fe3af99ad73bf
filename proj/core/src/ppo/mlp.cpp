#include <maskrl/ppo/mlp.hpp>

#include <stdexcept>

namespace maskrl {

const char* to_string(Activation activation) { return activation == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu" || name == "ReLU") return Activation::relu;
  if (name == "tanh" || name == "Tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<Index> sizes, Activation activation) : sizes_(std::move(sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (Index s : sizes_)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) num_params_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
}

Matrix orthogonal_matrix(Index rows, Index cols, double gain, Rng& rng) {
  const bool wide = rows < cols;
  const Index r = wide ? cols : rows;
  const Index c = wide ? rows : cols;
  std::normal_distribution<double> normal;
  Matrix a(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(r, c);
  const Matrix rr = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (Index j = 0; j < c; ++j)
    if (rr(j, j) < 0.0) q.col(j) *= -1.0;
  if (wide) q.transposeInPlace();
  return gain * q;
}

void Mlp::initialize(double* params, Rng& rng, double hidden_gain, double output_gain) const {
  double* p = params;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const Index in = sizes_[l];
    const Index out = sizes_[l + 1];
    const double gain = l + 2 == sizes_.size() ? output_gain : hidden_gain;
    Eigen::Map<Matrix>(p, out, in) = orthogonal_matrix(out, in, gain, rng);
    p += out * in;
    Eigen::Map<Vector>(p, out).setZero();
    p += out;
  }
}

Matrix Mlp::forward(const double* params, const Matrix& x, Cache* cache) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  const double* p = params;
  Matrix h = x;
  const size_t layers = sizes_.size() - 1;
  for (size_t l = 0; l < layers; ++l) {
    const Index in = sizes_[l];
    const Index out = sizes_[l + 1];
    Eigen::Map<const Matrix> w(p, out, in);
    p += out * in;
    Eigen::Map<const Vector> b(p, out);
    p += out;
    if (cache) cache->inputs.push_back(h);
    Matrix z = w * h;
    z.colwise() += b;
    if (l + 1 == layers) return z;
    if (cache) cache->pre.push_back(z);
    if (activation_ == Activation::relu)
      h = z.cwiseMax(0.0);
    else
      h = z.array().tanh().matrix();
  }
  return h;
}

Matrix Mlp::backward(const double* params, const Cache& cache, const Matrix& grad_out, double* grad) const {
  const size_t layers = sizes_.size() - 1;
  if (cache.inputs.size() != layers) throw std::invalid_argument("Mlp::backward: cache does not match the network");
  std::vector<Index> offsets(layers);
  Index off = 0;
  for (size_t l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  Matrix g = grad_out;
  for (size_t li = layers; li-- > 0;) {
    const Index in = sizes_[li];
    const Index out = sizes_[li + 1];
    Eigen::Map<const Matrix> w(params + offsets[li], out, in);
    Eigen::Map<Matrix> gw(grad + offsets[li], out, in);
    Eigen::Map<Vector> gb(grad + offsets[li] + out * in, out);
    gw.noalias() += g * cache.inputs[li].transpose();
    gb += g.rowwise().sum();
    Matrix gin = w.transpose() * g;
    if (li > 0) {
      const Matrix& z = cache.pre[li - 1];
      if (activation_ == Activation::relu)
        gin = gin.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
      else
        gin = gin.cwiseProduct((1.0 - z.array().tanh().square()).matrix());
    }
    g = std::move(gin);
  }
  return g;
}

}  // namespace maskrl
