#include "gctm/gcn.hpp"

#include <stdexcept>
#include <string>

namespace gctm {

std::vector<int> GcnParams::dims() const {
  std::vector<int> d;
  d.push_back(input_dim());
  for (const auto& W : weights) d.push_back(static_cast<int>(W.cols()));
  return d;
}

GcnParams GcnParams::random(const std::vector<int>& dims, double stddev, std::mt19937_64& rng) {
  if (dims.size() < 2) throw std::invalid_argument("GCN needs at least one layer");
  std::normal_distribution<double> gauss(0.0, stddev);
  GcnParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Matrix W(dims[l], dims[l + 1]);
    for (int r = 0; r < W.rows(); ++r)
      for (int c = 0; c < W.cols(); ++c) W(r, c) = gauss(rng);
    p.weights.push_back(std::move(W));
    p.biases.push_back(RowVector::Zero(dims[l + 1]));
  }
  return p;
}

namespace {

void check_shapes(const FeatureMatrix& X, const NormalizedAdjacency& adj,
                  const GcnParams& params) {
  if (params.weights.size() != params.biases.size()) {
    throw std::invalid_argument("gcn: weight/bias layer count mismatch");
  }
  if (X.rows() != adj.size()) throw std::invalid_argument("gcn: feature rows != graph nodes");
  if (X.cols() != params.input_dim()) {
    throw std::invalid_argument("gcn: feature dim != first layer input dim");
  }
  for (int l = 0; l < params.layers(); ++l) {
    if (params.biases[l].size() != params.weights[l].cols()) {
      throw std::invalid_argument("gcn: bias dim mismatch at layer " + std::to_string(l + 1));
    }
    if (l > 0 && params.weights[l].rows() != params.weights[l - 1].cols()) {
      throw std::invalid_argument("gcn: weight chain mismatch at layer " + std::to_string(l + 1));
    }
  }
}

}  // namespace

std::pair<Matrix, GcnActivationCache> gcn_forward(const FeatureMatrix& X,
                                                  const NormalizedAdjacency& adj,
                                                  const GcnParams& params, bool relu_output) {
  check_shapes(X, adj, params);
  const int L = params.layers();
  GcnActivationCache cache;
  cache.input = X;
  cache.dims = params.dims();
  cache.relu_output = relu_output;
  cache.adj = &adj;
  Matrix h;  // h_{l-1}, V x dims[l-1]; layer 1 reads X directly
  for (int l = 0; l < L; ++l) {
    Matrix lin = (l == 0) ? X.apply(params.weights[0]) : Matrix(h * params.weights[l]);
    lin.rowwise() += params.biases[l];
    Matrix z = adj.mat * lin;
    if (!z.allFinite()) {
      throw std::runtime_error("gcn_forward: non-finite values at layer " + std::to_string(l + 1));
    }
    cache.preactivations.push_back(z);
    if (l + 1 < L) {
      h = z.cwiseMax(0.0);
      cache.hidden.push_back(h);
    } else {
      h = relu_output ? Matrix(z.cwiseMax(0.0)) : std::move(z);
    }
  }
  cache.output = h.transpose();
  return {cache.output, cache};
}

GcnGradients gcn_backward(const Matrix& grad_h, const NormalizedAdjacency& adj,
                          const GcnParams& params, const GcnActivationCache& cache) {
  if (cache.dims != params.dims()) {
    throw std::invalid_argument("gcn_backward: cache does not match parameters");
  }
  const int L = params.layers();
  if (grad_h.rows() != params.output_dim() || grad_h.cols() != adj.size()) {
    throw std::invalid_argument("gcn_backward: grad_h shape mismatch");
  }
  GcnGradients grads;
  grads.weights.resize(L);
  grads.biases.resize(L);
  Matrix g = grad_h.transpose();  // dL/dh_l, starting at l = L
  for (int l = L - 1; l >= 0; --l) {
    // dL/dZ_l; ReLU' is 0 at exactly 0
    Matrix d;
    if (l == L - 1 && !cache.relu_output) {
      d = std::move(g);
    } else {
      d = (cache.preactivations[l].array() > 0.0).select(g, 0.0);
    }
    const Matrix p = adj.mat * d;  // A^ is symmetric
    grads.weights[l] = (l == 0) ? cache.input.apply_transposed(p)
                                : Matrix(cache.hidden[l - 1].transpose() * p);
    grads.biases[l] = p.colwise().sum();
    if (l > 0) g = p * params.weights[l].transpose();
  }
  return grads;
}

}  // namespace gctm
