#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gctm/util.hpp"

namespace gctm {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Undirected weighted word-relation graph. Self-loops are forbidden here;
// the normalization adds the unit self-loop itself.
struct KnowledgeGraph {
  struct Edge {
    int i;
    int j;
    double w;
  };
  int num_nodes = 0;
  std::vector<Edge> edges;
};

// Symmetric-normalized operator D~^{-1/2} (A + I) D~^{-1/2} with
// D~_ii = sum_j (A + I)_ij, stored sparse.
struct NormalizedAdjacency {
  SparseMatrix mat;

  int size() const { return static_cast<int>(mat.rows()); }
};

// Node features X (V x M). The identity default is kept as a flag instead of
// a materialized matrix so products with it cost nothing.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;  // empty; use the factories below

  static FeatureMatrix identity(int V);
  static FeatureMatrix dense(Matrix X);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_identity() const { return identity_; }

  // X * W
  Matrix apply(const Matrix& W) const;
  // X^T * P
  Matrix apply_transposed(const Matrix& P) const;

 private:
  bool identity_ = false;
  int rows_ = 0;
  int cols_ = 0;
  Matrix dense_;
};

KnowledgeGraph load_edge_list(const std::string& path, int V);

NormalizedAdjacency normalize(const KnowledgeGraph& g);

FeatureMatrix load_features(const std::string& path, int V, int M);
FeatureMatrix identity_features(int V);

}  // namespace gctm
