#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "gctm/corpus.hpp"
#include "gctm/gcn.hpp"
#include "gctm/graph.hpp"
#include "gctm/inference.hpp"
#include "gctm/util.hpp"

namespace gctm {

// K x V topic matrix with simplex rows, kept together with its log form.
struct TopicDistribution {
  Matrix prob;
  Matrix logp;
};

// Row k = softmax(rho_k * beta_k + (1 - rho_k) * h_k), max-subtracted.
TopicDistribution compute_tilde_beta(const Matrix& beta, const Matrix& h, const Vector& rho);

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  Matrix m;
  Matrix v;
};

// One bias-corrected ascent step (maximization) on a single tensor.
// `step` is the 1-based shared optimizer step.
template <typename Param, typename Grad>
void adam_update(Param& param, const Grad& grad, AdamMoments& mom, std::int64_t step,
                 const AdamOptions& opts) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
    throw std::invalid_argument("adam_update: parameter/gradient shape mismatch");
  }
  if (mom.m.size() == 0) {
    mom.m = Matrix::Zero(param.rows(), param.cols());
    mom.v = Matrix::Zero(param.rows(), param.cols());
  }
  mom.m = opts.beta1 * mom.m + (1.0 - opts.beta1) * grad;
  mom.v = opts.beta2 * mom.v.array() + (1.0 - opts.beta2) * grad.array().square();
  const double c1 = 1.0 - std::pow(opts.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(opts.beta2, static_cast<double>(step));
  param.array() += opts.lr * (mom.m.array() / c1) / ((mom.v.array() / c2).sqrt() + opts.eps);
}

// Moment buffers for every GCTM tensor, in the fixed order
// (beta, W_1..W_L, b_1..b_L, rho).
struct AdamState {
  AdamOptions opts;
  std::int64_t step = 0;
  AdamMoments beta;
  std::vector<AdamMoments> weights;
  std::vector<AdamMoments> biases;
  AdamMoments rho;
};

struct GctmConfig {
  int K = 0;
  int V = 0;
  int layers = 2;
  int hidden_dim = 0;  // 0 means K
  int input_dim = 0;   // feature dimension M; 0 means V (identity features)
  double sigma_beta = 1.0;
  double sigma_w = 1.0;
  double alpha = 0.01;
  double init_stddev = 0.1;
  double rho_init = 0.5;   // effective value of every rho_k at start
  bool squash_rho = true;  // optimize an unconstrained value mapped onto (0,1)
  int inner_steps = 100;
  AdamOptions adam;
  LocalVbOptions local_vb;
};

// All global learnable parameters plus the previous-minibatch snapshot that
// forms the recursive Gaussian prior.
struct GctmState {
  GctmConfig config;
  Matrix beta;       // K x V
  Matrix prev_beta;  // beta^{t-1}
  GcnParams gcn;
  GcnParams prev_gcn;
  Vector rho_raw;  // length K; squashed onto (0,1) when config.squash_rho
  Vector alpha;    // length K
  std::int64_t t = 0;
  AdamState adam;

  Vector effective_rho() const;
  std::vector<int> gcn_dims() const;

  static GctmState init(const GctmConfig& cfg, std::mt19937_64& rng);
};

// The part of the objective that depends on the global parameters:
//   -||beta - prev_beta||_F^2 / (2 sigma_beta^2)
//   -||W~  - prev_W~ ||_F^2 / (2 sigma_w^2)
//   + sum_kv ss_kv log beta~_kv
// with beta~ built from the current beta and the given GCN output h.
double elbo_global(const GctmState& state, const Matrix& h, const SufficientStats& ss);

struct GctmGradients {
  Matrix beta;
  GcnGradients gcn;
  Vector rho_raw;
};

// Exact gradients of elbo_global. `cache` must be the cache of the forward
// pass that produced `h`.
GctmGradients grad_elbo(const GctmState& state, const Matrix& h, const GcnActivationCache& cache,
                        const SufficientStats& ss);

// One shared ascent step over all GCTM tensors (beta, every W_l and b_l,
// rho); advances the optimizer step counter once.
void adam_step(GctmState& state, const GctmGradients& grads);

// One minibatch of the streaming loop: beta~ from the snapshot for LocalVB,
// sufficient statistics, inner_steps Adam iterations on (beta, W~, rho),
// then snapshot and advance t.
void train_minibatch(GctmState& state, const Minibatch& batch, const FeatureMatrix& X,
                     const NormalizedAdjacency& adj);

// Current point estimate beta~ = softmax(rho beta + (1-rho) GCN(X)).
TopicDistribution point_estimate(const GctmState& state, const FeatureMatrix& X,
                                 const NormalizedAdjacency& adj);

}  // namespace gctm
