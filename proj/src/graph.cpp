#include "gctm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gctm {

KnowledgeGraph load_edge_list(const std::string& path, int V) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path);
  KnowledgeGraph g;
  g.num_nodes = V;
  std::set<std::pair<int, int>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == EOF) break;
    std::istringstream ls(line);
    int i = 0, j = 0;
    double w = 1.0;
    if (!(ls >> i >> j)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected `i j [w]`");
    }
    std::string wtok;
    if (ls >> wtok) {  // optional weight, default 1.0
      try {
        std::size_t pos = 0;
        w = std::stod(wtok, &pos);
        if (pos != wtok.size()) throw std::invalid_argument(wtok);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad weight \"" +
                                 wtok + "\"");
      }
      std::string extra;
      if (ls >> extra) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing token \"" +
                                 extra + "\"");
      }
    }
    if (i < 0 || i >= V || j < 0 || j >= V) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": node id out of range");
    }
    if (i == j) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": self-loop at node " +
                               std::to_string(i));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": weight must be positive");
    }
    const auto key = std::minmax(i, j);
    if (!seen.insert(key).second) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate edge (" +
                               std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    }
    g.edges.push_back({i, j, w});
    ++lineno;
  }
  return g;
}

NormalizedAdjacency normalize(const KnowledgeGraph& g) {
  const int V = g.num_nodes;
  Vector degree = Vector::Ones(V);  // the unit self-loop of A + I
  for (const auto& e : g.edges) {
    degree[e.i] += e.w;
    degree[e.j] += e.w;
  }
  const Vector inv_sqrt = degree.array().rsqrt();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * g.edges.size() + V);
  for (int i = 0; i < V; ++i) trip.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
  for (const auto& e : g.edges) {
    const double v = e.w * inv_sqrt[e.i] * inv_sqrt[e.j];
    trip.emplace_back(e.i, e.j, v);
    trip.emplace_back(e.j, e.i, v);
  }
  NormalizedAdjacency out;
  out.mat.resize(V, V);
  out.mat.setFromTriplets(trip.begin(), trip.end());
  out.mat.makeCompressed();
  return out;
}

FeatureMatrix FeatureMatrix::identity(int V) {
  if (V < 1) throw std::invalid_argument("identity features need V >= 1");
  FeatureMatrix f;
  f.identity_ = true;
  f.rows_ = V;
  f.cols_ = V;
  return f;
}

FeatureMatrix FeatureMatrix::dense(Matrix X) {
  if (!X.allFinite()) throw std::invalid_argument("feature matrix has non-finite entries");
  FeatureMatrix f;
  f.rows_ = static_cast<int>(X.rows());
  f.cols_ = static_cast<int>(X.cols());
  f.dense_ = std::move(X);
  return f;
}

Matrix FeatureMatrix::apply(const Matrix& W) const {
  if (W.rows() != cols_) throw std::invalid_argument("feature/weight shape mismatch");
  return identity_ ? W : dense_ * W;
}

Matrix FeatureMatrix::apply_transposed(const Matrix& P) const {
  if (P.rows() != rows_) throw std::invalid_argument("feature/gradient shape mismatch");
  return identity_ ? P : dense_.transpose() * P;
}

FeatureMatrix load_features(const std::string& path, int V, int M) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file " + path);
  Matrix X = Matrix::Zero(V, M);
  std::vector<bool> seen(V, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == EOF) break;
    std::istringstream ls(line);
    int node = 0;
    if (!(ls >> node) || node < 0 || node >= V) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad node id");
    }
    if (seen[node]) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": node " +
                               std::to_string(node) + " listed twice");
    }
    seen[node] = true;
    for (int m = 0; m < M; ++m) {
      double v = 0.0;
      if (!(ls >> v)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(M) + " feature values");
      }
      if (!std::isfinite(v)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-finite feature");
      }
      X(node, m) = v;
    }
    ++lineno;
  }
  for (int i = 0; i < V; ++i) {
    if (!seen[i]) throw std::runtime_error(path + ": missing feature row for node " + std::to_string(i));
  }
  return FeatureMatrix::dense(std::move(X));
}

FeatureMatrix identity_features(int V) { return FeatureMatrix::identity(V); }

}  // namespace gctm
