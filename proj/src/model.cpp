#include "gctm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gctm {

TopicDistribution compute_tilde_beta(const Matrix& beta, const Matrix& h, const Vector& rho) {
  if (beta.rows() != h.rows() || beta.cols() != h.cols() || rho.size() != beta.rows()) {
    throw std::invalid_argument("compute_tilde_beta: shape mismatch");
  }
  if (!beta.allFinite() || !h.allFinite() || !rho.allFinite()) {
    throw std::invalid_argument("compute_tilde_beta: non-finite input");
  }
  const int K = static_cast<int>(beta.rows());
  TopicDistribution out;
  out.prob.resizeLike(beta);
  out.logp.resizeLike(beta);
  for (int k = 0; k < K; ++k) {
    RowVector u = rho[k] * beta.row(k) + (1.0 - rho[k]) * h.row(k);
    const double lse = log_sum_exp(u);
    out.logp.row(k) = u.array() - lse;
    out.prob.row(k) = out.logp.row(k).array().exp();
  }
  return out;
}

Vector GctmState::effective_rho() const {
  if (!config.squash_rho) return rho_raw;
  Vector rho(rho_raw.size());
  for (int k = 0; k < rho.size(); ++k) rho[k] = sigmoid(rho_raw[k]);
  return rho;
}

std::vector<int> GctmState::gcn_dims() const { return gcn.dims(); }

GctmState GctmState::init(const GctmConfig& cfg, std::mt19937_64& rng) {
  if (cfg.K < 1 || cfg.V < 1) throw std::invalid_argument("GctmState: K and V must be positive");
  if (cfg.layers < 1) throw std::invalid_argument("GctmState: need at least one GCN layer");
  if (!(cfg.sigma_beta > 0.0) || !(cfg.sigma_w > 0.0)) {
    throw std::invalid_argument("GctmState: sigmas must be positive");
  }
  GctmState s;
  s.config = cfg;
  std::normal_distribution<double> gauss(0.0, cfg.init_stddev);
  s.beta.resize(cfg.K, cfg.V);
  for (int k = 0; k < cfg.K; ++k)
    for (int v = 0; v < cfg.V; ++v) s.beta(k, v) = gauss(rng);

  const int hidden = cfg.hidden_dim > 0 ? cfg.hidden_dim : cfg.K;
  std::vector<int> dims;
  dims.push_back(cfg.input_dim > 0 ? cfg.input_dim : cfg.V);
  for (int l = 1; l < cfg.layers; ++l) dims.push_back(hidden);
  dims.push_back(cfg.K);
  s.gcn = GcnParams::random(dims, cfg.init_stddev, rng);

  if (cfg.squash_rho) {
    if (!(cfg.rho_init > 0.0 && cfg.rho_init < 1.0)) {
      throw std::invalid_argument(
          "GctmState: squashed rho needs rho_init in (0,1); disable squashing for endpoints");
    }
    s.rho_raw = Vector::Constant(cfg.K, logit(cfg.rho_init));
  } else {
    s.rho_raw = Vector::Constant(cfg.K, cfg.rho_init);
  }
  s.alpha = Vector::Constant(cfg.K, cfg.alpha);
  s.prev_beta = s.beta;
  s.prev_gcn = s.gcn;
  s.adam.opts = cfg.adam;
  s.adam.weights.resize(s.gcn.layers());
  s.adam.biases.resize(s.gcn.layers());
  return s;
}

namespace {

double transition_penalty(const GctmState& s) {
  const double inv_b = 1.0 / (2.0 * s.config.sigma_beta * s.config.sigma_beta);
  const double inv_w = 1.0 / (2.0 * s.config.sigma_w * s.config.sigma_w);
  double pen = inv_b * (s.beta - s.prev_beta).squaredNorm();
  for (int l = 0; l < s.gcn.layers(); ++l) {
    pen += inv_w * (s.gcn.weights[l] - s.prev_gcn.weights[l]).squaredNorm();
    pen += inv_w * (s.gcn.biases[l] - s.prev_gcn.biases[l]).squaredNorm();
  }
  return pen;
}

}  // namespace

double elbo_global(const GctmState& state, const Matrix& h, const SufficientStats& ss) {
  const TopicDistribution tb = compute_tilde_beta(state.beta, h, state.effective_rho());
  const double data_term = (ss.ss.array() * tb.logp.array()).sum();
  const double value = data_term - transition_penalty(state);
  if (!std::isfinite(value)) throw std::runtime_error("elbo_global: non-finite value");
  return value;
}

GctmGradients grad_elbo(const GctmState& state, const Matrix& h, const GcnActivationCache& cache,
                        const SufficientStats& ss) {
  if (cache.output.rows() != h.rows() || cache.output.cols() != h.cols() ||
      !(cache.output.array() == h.array()).all()) {
    throw std::invalid_argument("grad_elbo: cache is stale (h does not match its forward pass)");
  }
  const Vector rho = state.effective_rho();
  const TopicDistribution tb = compute_tilde_beta(state.beta, h, rho);
  const Vector row_mass = ss.ss.rowwise().sum();
  // d/d u_kv of sum_v ss_kv log softmax(u_k)_v
  const Matrix g_u = ss.ss - row_mass.asDiagonal() * tb.prob;

  GctmGradients grads;
  const double inv_b2 = 1.0 / (state.config.sigma_beta * state.config.sigma_beta);
  const double inv_w2 = 1.0 / (state.config.sigma_w * state.config.sigma_w);
  grads.beta = rho.asDiagonal() * g_u - inv_b2 * (state.beta - state.prev_beta);

  if (cache.adj == nullptr) throw std::invalid_argument("grad_elbo: cache has no adjacency");
  const Matrix g_h = (Vector::Ones(rho.size()) - rho).asDiagonal() * g_u;
  grads.gcn = gcn_backward(g_h, *cache.adj, state.gcn, cache);
  for (int l = 0; l < state.gcn.layers(); ++l) {
    grads.gcn.weights[l] -= inv_w2 * (state.gcn.weights[l] - state.prev_gcn.weights[l]);
    grads.gcn.biases[l] -= inv_w2 * (state.gcn.biases[l] - state.prev_gcn.biases[l]);
  }

  grads.rho_raw = (g_u.array() * (state.beta - h).array()).rowwise().sum();
  if (state.config.squash_rho) {
    grads.rho_raw.array() *= rho.array() * (1.0 - rho.array());
  }
  return grads;
}

void adam_step(GctmState& state, const GctmGradients& grads) {
  auto& adam = state.adam;
  adam.step += 1;
  adam_update(state.beta, grads.beta, adam.beta, adam.step, adam.opts);
  for (int l = 0; l < state.gcn.layers(); ++l) {
    adam_update(state.gcn.weights[l], grads.gcn.weights[l], adam.weights[l], adam.step, adam.opts);
    adam_update(state.gcn.biases[l], grads.gcn.biases[l], adam.biases[l], adam.step, adam.opts);
  }
  adam_update(state.rho_raw, grads.rho_raw, adam.rho, adam.step, adam.opts);
}

void train_minibatch(GctmState& state, const Minibatch& batch, const FeatureMatrix& X,
                     const NormalizedAdjacency& adj) {
  if (batch.docs.empty()) throw std::invalid_argument("train_minibatch: empty minibatch");

  // LocalVB runs against beta~ built from the snapshot beta^{t-1} and the
  // GCN output of the carried-over weights.
  auto [h0, cache0] = gcn_forward(X, adj, state.gcn);
  const TopicDistribution tb0 = compute_tilde_beta(state.prev_beta, h0, state.effective_rho());
  LogTopicMatrix logbeta{tb0.logp};

  std::vector<LocalPosterior> posteriors;
  posteriors.reserve(batch.docs.size());
  for (std::size_t d = 0; d < batch.docs.size(); ++d) {
    try {
      posteriors.push_back(local_vb(batch.docs[d], logbeta, state.alpha, state.config.local_vb));
    } catch (const std::exception& e) {
      throw std::runtime_error("minibatch " + std::to_string(batch.index) + ", document " +
                               std::to_string(d) + ": " + e.what());
    }
  }
  const SufficientStats ss =
      collect_stats(posteriors, batch.docs, state.config.K, state.config.V);

  for (int i = 0; i < state.config.inner_steps; ++i) {
    auto [h, cache] = gcn_forward(X, adj, state.gcn);
    const GctmGradients grads = grad_elbo(state, h, cache, ss);
    adam_step(state, grads);
  }

  state.prev_beta = state.beta;
  state.prev_gcn = state.gcn;
  state.t += 1;
}

TopicDistribution point_estimate(const GctmState& state, const FeatureMatrix& X,
                                 const NormalizedAdjacency& adj) {
  auto [h, cache] = gcn_forward(X, adj, state.gcn);
  return compute_tilde_beta(state.beta, h, state.effective_rho());
}

}  // namespace gctm
