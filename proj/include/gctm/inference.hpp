#pragma once

#include <vector>

#include "gctm/corpus.hpp"
#include "gctm/util.hpp"

namespace gctm {

// psi(x) for x > 0: recurrence up to x >= 10, then the asymptotic
// Bernoulli series. Absolute error well below 1e-10 for x >= 1e-3.
double digamma(double x);

// K x V log word probabilities: rows of log beta~ for GCTM, or
// E_q[log beta] for the Dirichlet baselines.
struct LogTopicMatrix {
  Matrix logp;

  int topics() const { return static_cast<int>(logp.rows()); }
  int vocab() const { return static_cast<int>(logp.cols()); }
};

// Per-document variational parameters. phi has one row per distinct term of
// the document, aligned with Document::counts order; each row is a simplex
// over the K topics.
struct LocalPosterior {
  Vector gamma;  // length K
  Matrix phi;    // (#distinct terms) x K
};

struct SufficientStats {
  Matrix ss;  // K x V, ss_kv = sum_d phi_dkv * n_dv
};

struct LocalVbOptions {
  double tol = 1e-5;  // on the mean absolute change of gamma
  int max_iter = 50;
};

// Alternating phi/gamma updates to convergence. gamma starts at
// alpha_k + N_d / K; phi rows are normalized in log space.
LocalPosterior local_vb(const Document& doc, const LogTopicMatrix& logbeta,
                        const Vector& alpha, const LocalVbOptions& opts = {});

SufficientStats collect_stats(const std::vector<LocalPosterior>& posteriors,
                              const std::vector<Document>& docs, int K, int V);

}  // namespace gctm
