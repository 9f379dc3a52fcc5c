#include <doctest.h>

#include <set>

#include "gctm/graph.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

using namespace gctm;
using testutil::TempDir;

TEST_CASE("load_edge_list parses weights and defaults") {
  TempDir tmp;
  const auto g = load_edge_list(tmp.file("g.txt", "0 1 0.5\n"), 3);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].i == 0);
  CHECK(g.edges[0].j == 1);
  CHECK(g.edges[0].w == 0.5);

  const auto d = load_edge_list(tmp.file("g2.txt", "1 2\n"), 3);
  CHECK(d.edges[0].w == 1.0);
}

TEST_CASE("load_edge_list rejections") {
  TempDir tmp;
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("a.txt", "0 1 1.0\n1 0 2.0\n"), 3),
                       doctest::Contains("duplicate edge (0,1)"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("b.txt", "2 2 1.0\n"), 3),
                       doctest::Contains("self-loop"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("c.txt", "0 9 1.0\n"), 3),
                       doctest::Contains("out of range"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("d.txt", "0 1 -2.0\n"), 3),
                       doctest::Contains("positive"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("e.txt", "0 1 1.0 junk\n"), 3),
                       doctest::Contains("trailing"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("f.txt", "0 1 abc\n"), 3),
                       doctest::Contains("bad weight"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("g.txt", "0 1 nan\n"), 3),
                       doctest::Contains("positive"), std::runtime_error);
}

TEST_CASE("normalize: no edges gives the identity") {
  KnowledgeGraph g;
  g.num_nodes = 2;
  const NormalizedAdjacency adj = normalize(g);
  const Matrix dense = Matrix(adj.mat);
  CHECK(dense.isApprox(Matrix::Identity(2, 2), 1e-15));
}

TEST_CASE("normalize: a single unit edge averages both nodes") {
  KnowledgeGraph g;
  g.num_nodes = 2;
  g.edges.push_back({0, 1, 1.0});
  const Matrix dense = Matrix(normalize(g).mat);
  Matrix want(2, 2);
  want << 0.5, 0.5, 0.5, 0.5;
  CHECK((dense - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("normalize: path graph values frozen by hand") {
  KnowledgeGraph g;
  g.num_nodes = 3;
  g.edges.push_back({0, 1, 1.0});
  g.edges.push_back({1, 2, 1.0});
  const Matrix dense = Matrix(normalize(g).mat);
  // degrees with self-loops: (2, 3, 2)
  CHECK(dense(0, 1) == doctest::Approx(0.4082482904638631).epsilon(1e-12));
  CHECK(dense(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("normalize matches the dense oracle on random graphs") {
  std::mt19937_64 rng(20240);
  for (int trial = 0; trial < 25; ++trial) {
    const int V = 2 + static_cast<int>(uniform_index(rng, 19));  // 2..20
    const KnowledgeGraph g = synth::random_graph(V, 0.3, rng);
    const Matrix sparse = Matrix(normalize(g).mat);
    const Matrix dense = oracle::dense_normalized_adjacency(g);
    CHECK((sparse - dense).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalize is exactly symmetric with the (A+I) pattern") {
  std::mt19937_64 rng(5150);
  const KnowledgeGraph g = synth::random_graph(12, 0.25, rng);
  const NormalizedAdjacency adj = normalize(g);
  const Matrix dense = Matrix(adj.mat);
  for (int i = 0; i < 12; ++i) {
    CHECK(dense(i, i) > 0.0);
    for (int j = 0; j < 12; ++j) {
      CHECK(dense(i, j) == dense(j, i));  // exact, not approximate
    }
  }
  // pattern: nonzero iff diagonal or an edge
  std::set<std::pair<int, int>> edges;
  for (const auto& e : g.edges) {
    edges.insert({e.i, e.j});
    edges.insert({e.j, e.i});
  }
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      const bool expect = (i == j) || edges.count({i, j}) > 0;
      CHECK((dense(i, j) != 0.0) == expect);
    }
  }
}

TEST_CASE("identity and file features") {
  const FeatureMatrix id = identity_features(3);
  CHECK(id.is_identity());
  Matrix w = Matrix::Random(3, 2);
  CHECK(id.apply(w) == w);

  TempDir tmp;
  const FeatureMatrix f = load_features(tmp.file("f.txt", "0 1.0 0.0\n1 0.0 2.0\n"), 2, 2);
  Matrix want(2, 2);
  want << 1, 0, 0, 2;
  CHECK(f.apply(Matrix::Identity(2, 2)) == want);

  CHECK_THROWS_WITH_AS(load_features(tmp.file("g.txt", "0 1.0 0.0\n"), 2, 2),
                       doctest::Contains("missing feature row for node 1"), std::runtime_error);
  CHECK_THROWS_AS(load_features(tmp.file("h.txt", "0 1.0 nan\n1 0.0 2.0\n"), 2, 2),
                  std::runtime_error);
  CHECK_THROWS_WITH_AS(load_features(tmp.file("i.txt", "0 1.0 0.0\n0 0.0 2.0\n"), 2, 2),
                       doctest::Contains("listed twice"), std::runtime_error);

  Matrix bad(1, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_WITH_AS(FeatureMatrix::dense(bad), doctest::Contains("non-finite"),
                       std::invalid_argument);
}
