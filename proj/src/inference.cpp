#include "gctm/inference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gctm {

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // log(x) - 1/(2x) - sum_k B_{2k} / (2k x^{2k})
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

LocalPosterior local_vb(const Document& doc, const LogTopicMatrix& logbeta,
                        const Vector& alpha, const LocalVbOptions& opts) {
  const int K = logbeta.topics();
  if (alpha.size() != K) throw std::invalid_argument("local_vb: alpha length != K");
  if (!logbeta.logp.allFinite()) throw std::invalid_argument("local_vb: non-finite logbeta");
  const int terms = static_cast<int>(doc.counts.size());
  if (terms == 0) throw std::invalid_argument("local_vb: empty document");

  const double total = doc.length();
  Vector gamma = alpha.array() + total / K;
  Matrix phi(terms, K);
  Vector elog(K);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double psi_sum = digamma(gamma.sum());
    for (int k = 0; k < K; ++k) elog[k] = digamma(gamma[k]) - psi_sum;

    Vector gamma_next = alpha;
    for (int r = 0; r < terms; ++r) {
      const auto [v, n] = doc.counts[r];
      RowVector logphi = elog.transpose() + logbeta.logp.col(v).transpose();
      logphi.array() -= logphi.maxCoeff();
      RowVector p = logphi.array().exp();
      p /= p.sum();
      phi.row(r) = p;
      gamma_next += n * p.transpose();
    }
    const double change = (gamma_next - gamma).cwiseAbs().mean();
    gamma = gamma_next;
    if (!gamma.allFinite()) {
      throw std::runtime_error("local_vb: non-finite gamma update");
    }
    if (change < opts.tol) break;
  }
  return {std::move(gamma), std::move(phi)};
}

SufficientStats collect_stats(const std::vector<LocalPosterior>& posteriors,
                              const std::vector<Document>& docs, int K, int V) {
  if (posteriors.size() != docs.size()) {
    throw std::invalid_argument("collect_stats: posterior/document lists misaligned");
  }
  SufficientStats stats;
  stats.ss = Matrix::Zero(K, V);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& doc = docs[d];
    const auto& phi = posteriors[d].phi;
    if (phi.rows() != static_cast<int>(doc.counts.size()) || phi.cols() != K) {
      throw std::invalid_argument("collect_stats: phi shape does not match document " +
                                  std::to_string(d));
    }
    for (int r = 0; r < phi.rows(); ++r) {
      const auto [v, n] = doc.counts[r];
      stats.ss.col(v) += n * phi.row(r).transpose();
    }
  }
  return stats;
}

}  // namespace gctm
