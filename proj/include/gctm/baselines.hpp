#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gctm/corpus.hpp"
#include "gctm/inference.hpp"
#include "gctm/util.hpp"

namespace gctm {

// Variational Dirichlet parameter lambda (K x V, strictly positive).
struct DirichletGlobal {
  Matrix lambda;

  int topics() const { return static_cast<int>(lambda.rows()); }
  int vocab() const { return static_cast<int>(lambda.cols()); }
};

enum class BaselineKind { svb, svbpp, pvb };

BaselineKind baseline_kind_from_string(const std::string& name);

struct BaselineConfig {
  double eta = 0.01;       // symmetric Dirichlet prior
  double rho_pp = 0.9;     // SVB-PP power-prior weight, in (0,1]
  double tau0 = 1.0;       // PVB decay offset
  double kappa = 0.9;      // PVB forgetting factor, in (0,1]
  double population = 1e4; // PVB population size S
  LocalVbOptions local_vb;
};

// E_q[log beta_kv] = psi(lambda_kv) - psi(sum_v lambda_kv)
LogTopicMatrix expected_log_beta(const DirichletGlobal& global);

// lambda^t = lambda^{t-1} + ss
DirichletGlobal svb_update(const DirichletGlobal& prev, const SufficientStats& ss);

// lambda^t = rho * lambda^{t-1} + (1 - rho) * eta + ss
DirichletGlobal svb_pp_update(const DirichletGlobal& prev, double eta, double rho_pp,
                              const SufficientStats& ss);

// rho_t = (tau0 + t)^{-kappa};  lambda~ = eta + (S/B) ss;
// lambda^t = rho_t * lambda~ + (1 - rho_t) * lambda^{t-1}
DirichletGlobal pvb_update(const DirichletGlobal& prev, double eta, const SufficientStats& ss,
                           std::int64_t t, double tau0, double kappa, double population,
                           double batch_size);

// Dirichlet mean, the baselines' point estimate of the topics.
Matrix dirichlet_mean(const DirichletGlobal& global);

// One minibatch step: LocalVB against E_q[log beta], sufficient statistics,
// then the kind's update. Shared by run_baseline and the harness.
DirichletGlobal baseline_minibatch_step(BaselineKind kind, const DirichletGlobal& lambda,
                                        const Minibatch& mb, const BaselineConfig& config,
                                        const Vector& alpha, int K, int V);

// Streaming loop shared by the three baselines: per minibatch run LocalVB
// against E_q[log beta], collect statistics, apply the kind's update.
// Returns lambda^t after every minibatch.
std::vector<DirichletGlobal> run_baseline(BaselineKind kind,
                                          const std::vector<Minibatch>& stream,
                                          const BaselineConfig& config, const Vector& alpha,
                                          int K, int V);

}  // namespace gctm
