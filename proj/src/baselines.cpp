#include "gctm/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace gctm {

BaselineKind baseline_kind_from_string(const std::string& name) {
  if (name == "svb") return BaselineKind::svb;
  if (name == "svbpp") return BaselineKind::svbpp;
  if (name == "pvb") return BaselineKind::pvb;
  throw std::invalid_argument("unknown baseline \"" + name + "\"");
}

LogTopicMatrix expected_log_beta(const DirichletGlobal& global) {
  if ((global.lambda.array() <= 0.0).any()) {
    throw std::invalid_argument("expected_log_beta: lambda must be strictly positive");
  }
  LogTopicMatrix out;
  out.logp.resizeLike(global.lambda);
  for (int k = 0; k < global.topics(); ++k) {
    const double psi_sum = digamma(global.lambda.row(k).sum());
    for (int v = 0; v < global.vocab(); ++v) {
      out.logp(k, v) = digamma(global.lambda(k, v)) - psi_sum;
    }
  }
  return out;
}

namespace {

void check_shapes(const DirichletGlobal& prev, const SufficientStats& ss) {
  if (prev.lambda.rows() != ss.ss.rows() || prev.lambda.cols() != ss.ss.cols()) {
    throw std::invalid_argument("baseline update: lambda/ss shape mismatch");
  }
}

}  // namespace

DirichletGlobal svb_update(const DirichletGlobal& prev, const SufficientStats& ss) {
  check_shapes(prev, ss);
  return {prev.lambda + ss.ss};
}

DirichletGlobal svb_pp_update(const DirichletGlobal& prev, double eta, double rho_pp,
                              const SufficientStats& ss) {
  check_shapes(prev, ss);
  if (!(rho_pp > 0.0 && rho_pp <= 1.0)) {
    throw std::invalid_argument("svb_pp_update: rho must lie in (0,1]");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("svb_pp_update: eta must be positive");
  return {(rho_pp * prev.lambda.array() + (1.0 - rho_pp) * eta + ss.ss.array()).matrix()};
}

DirichletGlobal pvb_update(const DirichletGlobal& prev, double eta, const SufficientStats& ss,
                           std::int64_t t, double tau0, double kappa, double population,
                           double batch_size) {
  check_shapes(prev, ss);
  if (t < 0) throw std::invalid_argument("pvb_update: t must be >= 0");
  if (!(tau0 > 0.0) || !(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("pvb_update: need tau0 > 0 and kappa in (0,1]");
  }
  if (!(population > 0.0) || !(batch_size > 0.0)) {
    throw std::invalid_argument("pvb_update: population and batch size must be positive");
  }
  const double rho_t = std::pow(tau0 + static_cast<double>(t), -kappa);
  const Matrix lambda_hat = (eta + (population / batch_size) * ss.ss.array()).matrix();
  return {rho_t * lambda_hat + (1.0 - rho_t) * prev.lambda};
}

Matrix dirichlet_mean(const DirichletGlobal& global) {
  Matrix mean = global.lambda;
  for (int k = 0; k < mean.rows(); ++k) mean.row(k) /= mean.row(k).sum();
  return mean;
}

DirichletGlobal baseline_minibatch_step(BaselineKind kind, const DirichletGlobal& lambda,
                                        const Minibatch& mb, const BaselineConfig& config,
                                        const Vector& alpha, int K, int V) {
  const LogTopicMatrix logbeta = expected_log_beta(lambda);
  std::vector<LocalPosterior> posteriors;
  posteriors.reserve(mb.docs.size());
  for (std::size_t d = 0; d < mb.docs.size(); ++d) {
    try {
      posteriors.push_back(local_vb(mb.docs[d], logbeta, alpha, config.local_vb));
    } catch (const std::exception& e) {
      throw std::runtime_error("minibatch " + std::to_string(mb.index) + ", document " +
                               std::to_string(d) + ": " + e.what());
    }
  }
  const SufficientStats ss = collect_stats(posteriors, mb.docs, K, V);
  switch (kind) {
    case BaselineKind::svb:
      return svb_update(lambda, ss);
    case BaselineKind::svbpp:
      return svb_pp_update(lambda, config.eta, config.rho_pp, ss);
    case BaselineKind::pvb:
      // B is the size of the arriving minibatch, re-read every time
      return pvb_update(lambda, config.eta, ss, mb.index, config.tau0, config.kappa,
                        config.population, static_cast<double>(mb.docs.size()));
  }
  throw std::logic_error("unreachable baseline kind");
}

std::vector<DirichletGlobal> run_baseline(BaselineKind kind,
                                          const std::vector<Minibatch>& stream,
                                          const BaselineConfig& config, const Vector& alpha,
                                          int K, int V) {
  DirichletGlobal lambda{Matrix::Constant(K, V, config.eta)};
  std::vector<DirichletGlobal> out;
  out.reserve(stream.size());
  for (const auto& mb : stream) {
    lambda = baseline_minibatch_step(kind, lambda, mb, config, alpha, K, V);
    out.push_back(lambda);
  }
  return out;
}

}  // namespace gctm
