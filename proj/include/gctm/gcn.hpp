#pragma once

#include <random>
#include <utility>
#include <vector>

#include "gctm/graph.hpp"
#include "gctm/util.hpp"

namespace gctm {

// L-layer GCN weights. dims = [M, hidden..., K]; layer l maps dims[l-1] to
// dims[l]. Hidden layers use ReLU, the output layer is linear so the
// embedding can carry signed logits into the topic combination.
struct GcnParams {
  std::vector<Matrix> weights;    // W_l: dims[l-1] x dims[l]
  std::vector<RowVector> biases;  // b_l: dims[l]

  int layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().rows()); }
  int output_dim() const { return static_cast<int>(weights.back().cols()); }
  std::vector<int> dims() const;

  static GcnParams random(const std::vector<int>& dims, double stddev, std::mt19937_64& rng);
};

// Gradients share the tensor layout of GcnParams.
using GcnGradients = GcnParams;

struct GcnActivationCache {
  FeatureMatrix input;                    // h_0 = X
  std::vector<Matrix> preactivations;     // Z_l = A^ (h_{l-1} W_l + b_l), V x dims[l]
  std::vector<Matrix> hidden;             // h_l = ReLU(Z_l) for l < L
  Matrix output;                          // h = h_L^T, K x V
  std::vector<int> dims;
  bool relu_output = false;
  const NormalizedAdjacency* adj = nullptr;  // non-owning; A^ is shared read-only
};

// Returns h (K x V, the transpose of h_L) and the cache for the backward
// pass. ReLU derivative is taken as 0 at exactly 0. The model keeps the
// output layer linear (h feeds signed logits); relu_output exists so the
// clamped variant stays testable.
std::pair<Matrix, GcnActivationCache> gcn_forward(const FeatureMatrix& X,
                                                  const NormalizedAdjacency& adj,
                                                  const GcnParams& params,
                                                  bool relu_output = false);

// Exact gradients of any scalar objective with gradient grad_h (K x V)
// with respect to h. Uses A^'s symmetry.
GcnGradients gcn_backward(const Matrix& grad_h, const NormalizedAdjacency& adj,
                          const GcnParams& params, const GcnActivationCache& cache);

}  // namespace gctm
