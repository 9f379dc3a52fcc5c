#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gctm/corpus.hpp"
#include "gctm/inference.hpp"
#include "gctm/util.hpp"

namespace gctm {

struct LppConfig {
  double ratio = 0.8;       // observed fraction of each test document
  int num_splits = 5;       // random splits averaged per evaluation
  std::uint64_t seed = 0;   // split seeds are fixed once per run
  LocalVbOptions local_vb;
};

struct NpmiConfig {
  int top_t = 20;
  double smoothing = 1e-2;  // added to the joint document count
};

struct EvalReport {
  std::vector<std::pair<int, double>> lpp_series;  // (minibatch, lpp)
  double npmi = 0.0;
  std::vector<std::vector<int>> top_words;  // per topic, ranked term ids
};

// Average per-held-out-token log predictive probability. For every split
// seed, each document is cut ratio:(1-ratio), theta is inferred on the
// observed part by LocalVB (normalized gamma), and each held-out token w
// scores log sum_k theta_k beta_kw. Per-document splits depend only on the
// split seed and the document contents, so the value is invariant to
// document order.
double lpp(const std::vector<Document>& test_docs, const Matrix& beta_point,
           const Vector& alpha, const LppConfig& cfg);

// Topic coherence over document co-occurrence counts, averaged over topics.
double npmi(const std::vector<std::vector<int>>& topics, const std::vector<Document>& corpus,
            const NpmiConfig& cfg);

// Term ids ranked by descending probability; ties break by ascending id.
std::vector<std::vector<int>> top_words(const Matrix& beta_point, int t);
std::vector<std::vector<std::string>> top_word_tokens(const Matrix& beta_point,
                                                      const Vocabulary& vocab, int t);

}  // namespace gctm
