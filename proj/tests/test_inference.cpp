#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

#include "gctm/inference.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace gctm;

TEST_CASE("digamma against reference table values") {
  // frozen from a 30-digit special-function evaluation
  CHECK(std::abs(digamma(1.0) - (-0.57721566490153286061)) < 1e-10);
  CHECK(std::abs(digamma(0.5) - (-1.9635100260214234794)) < 1e-10);
  CHECK(std::abs(digamma(2.0) - 0.42278433509846713939) < 1e-10);
  CHECK(std::abs(digamma(10.5) - 2.3030010342976863753) < 1e-10);
  CHECK(std::abs(digamma(0.001) - (-1000.5755719318102797)) < 1e-7);  // |psi| ~ 1e3 here
  CHECK(std::abs(digamma(0.001) - (-1000.5755719318102797)) / 1000.57 < 1e-10);
}

TEST_CASE("digamma recurrence psi(x+1) - psi(x) = 1/x") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(1e-3, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double x = unif(rng);
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-10);
  }
}

TEST_CASE("digamma cross-checked against boost") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(1e-3, 200.0);
  for (int i = 0; i < 500; ++i) {
    const double x = unif(rng);
    const double mine = digamma(x);
    const double ref = boost::math::digamma(x);
    CHECK(std::abs(mine - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  // log-spaced sweep across the recurrence/series boundary and far beyond it
  std::uniform_real_distribution<double> logx(-3.0, 8.0);
  for (int i = 0; i < 300; ++i) {
    const double x = std::pow(10.0, logx(rng));
    const double mine = digamma(x);
    const double ref = boost::math::digamma(x);
    CHECK(std::abs(mine - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("digamma rejects non-positive arguments") {
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
}

namespace {

Document make_doc(std::vector<std::pair<int, int>> counts) {
  Document d;
  d.counts = std::move(counts);
  return d;
}

}  // namespace

TEST_CASE("local_vb with K=1 converges in one step") {
  LogTopicMatrix lb{Matrix::Constant(1, 3, std::log(1.0 / 3.0))};
  const Vector alpha = Vector::Constant(1, 0.3);
  const Document doc = make_doc({{0, 2}, {2, 1}});
  const LocalPosterior post = local_vb(doc, lb, alpha);
  CHECK(post.gamma[0] == doctest::Approx(0.3 + 3.0).epsilon(1e-12));
  CHECK(post.phi(0, 0) == 1.0);
  CHECK(post.phi(1, 0) == 1.0);
}

TEST_CASE("local_vb symmetry: identical topic rows split phi evenly") {
  Matrix lb(2, 3);
  lb.row(0) << -1.0, -1.5, -0.7;
  lb.row(1) = lb.row(0);
  const Vector alpha = Vector::Constant(2, 0.1);
  const Document doc = make_doc({{0, 2}, {1, 2}});
  const LocalPosterior post = local_vb(doc, LogTopicMatrix{lb}, alpha);
  CHECK(post.phi(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.phi(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.gamma[0] == doctest::Approx(0.1 + 2.0).epsilon(1e-10));
  CHECK(post.gamma[1] == doctest::Approx(post.gamma[0]).epsilon(1e-12));
}

TEST_CASE("local_vb matches the long-run fixed-point oracle on the pinned instance") {
  Matrix beta(2, 3);
  beta.row(0) << 0.5, 0.3, 0.2;
  beta.row(1) << 0.2, 0.3, 0.5;
  const Matrix lb = beta.array().log().matrix();
  const Vector alpha = Vector::Constant(2, 0.01);
  const Document doc = make_doc({{0, 2}, {2, 1}});

  const LocalPosterior post = local_vb(doc, LogTopicMatrix{lb}, alpha, {1e-5, 50});
  const oracle::FixedPoint fp = oracle::fixed_point_local_vb(doc, lb, alpha);
  CHECK((post.gamma - fp.gamma).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((post.phi - fp.phi).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("local_vb output invariants hold after every call") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const synth::LocalVbInstance inst = synth::peaked_instance(rng);
    const LocalPosterior post = local_vb(inst.doc, LogTopicMatrix{inst.logbeta}, inst.alpha);
    for (int r = 0; r < post.phi.rows(); ++r) {
      CHECK(std::abs(post.phi.row(r).sum() - 1.0) < 1e-8);
    }
    for (int k = 0; k < inst.K; ++k) {
      CHECK(post.gamma[k] >= inst.alpha[k] - 1e-12);
    }
  }
}

TEST_CASE("local_vb is invariant to splitting a term entry") {
  Matrix lb(2, 3);
  lb.row(0) << -0.3, -2.0, -2.5;
  lb.row(1) << -2.5, -0.4, -1.9;
  const Vector alpha = Vector::Constant(2, 0.05);
  const Document merged = make_doc({{0, 2}, {1, 1}});
  const Document split = make_doc({{0, 1}, {0, 1}, {1, 1}});
  const LocalPosterior a = local_vb(merged, LogTopicMatrix{lb}, alpha);
  const LocalPosterior b = local_vb(split, LogTopicMatrix{lb}, alpha);
  CHECK((a.gamma - b.gamma).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.phi.row(0) - b.phi.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.phi.row(0) - b.phi.row(1)).cwiseAbs().maxCoeff() < 1e-12);  // same term, same row
}

TEST_CASE("local_vb per-document ELBO is non-decreasing across iterations") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    const synth::LocalVbInstance inst = synth::peaked_instance(rng);
    double last = -1e300;
    for (int iters = 1; iters <= 8; ++iters) {
      // tol 0 disables the early stop, so max_iter counts exactly
      const LocalPosterior post =
          local_vb(inst.doc, LogTopicMatrix{inst.logbeta}, inst.alpha, {0.0, iters});
      const double bound = oracle::local_elbo(inst.doc, post, inst.logbeta, inst.alpha);
      CHECK(bound >= last - 1e-9);
      last = bound;
    }
  }
}

TEST_CASE("local_vb rejects non-finite input") {
  Matrix lb(1, 2);
  lb << 0.0, std::nan("");
  CHECK_THROWS_AS(local_vb(make_doc({{0, 1}}), LogTopicMatrix{lb}, Vector::Constant(1, 0.1)),
                  std::invalid_argument);
}

TEST_CASE("collect_stats basics") {
  const Document doc = make_doc({{0, 3}});
  LocalPosterior post;
  post.gamma = Vector::Constant(1, 3.1);
  post.phi = Matrix::Ones(1, 1);
  const SufficientStats ss = collect_stats({post}, {doc}, 1, 4);
  CHECK(ss.ss(0, 0) == 3.0);
  CHECK(ss.ss.sum() == 3.0);
}

TEST_CASE("collect_stats with an even split") {
  const Document doc = make_doc({{1, 2}});
  LocalPosterior post;
  post.gamma = Vector::Constant(2, 1.0);
  post.phi = Matrix::Constant(1, 2, 0.5);
  const SufficientStats ss = collect_stats({post}, {doc}, 2, 3);
  CHECK(ss.ss(0, 1) == 1.0);
  CHECK(ss.ss(1, 1) == 1.0);
}

TEST_CASE("collect_stats conserves the token count") {
  std::mt19937_64 rng(321);
  const int K = 3, V = 8;
  Matrix beta = Matrix::Random(K, V).array() + 1.5;
  for (int k = 0; k < K; ++k) beta.row(k) /= beta.row(k).sum();
  const LogTopicMatrix lb{beta.array().log().matrix()};
  const Vector alpha = Vector::Constant(K, 0.1);

  std::vector<Document> docs;
  std::vector<LocalPosterior> posts;
  int total = 0;
  for (int d = 0; d < 12; ++d) {
    docs.push_back(synth::random_doc(V, 4, 3, rng));
    total += docs.back().length();
    posts.push_back(local_vb(docs.back(), lb, alpha));
  }
  const SufficientStats ss = collect_stats(posts, docs, K, V);
  CHECK(std::abs(ss.ss.sum() - total) < 1e-6);
  CHECK((ss.ss.array() >= 0.0).all());
}

TEST_CASE("collect_stats rejects misaligned lists") {
  const Document doc = make_doc({{0, 1}});
  CHECK_THROWS_AS(collect_stats({}, {doc}, 1, 2), std::invalid_argument);
}
