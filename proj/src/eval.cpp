#include "gctm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace gctm {

namespace {

constexpr double kBetaFloor = 1e-12;  // keeps LPP finite at beta_kw -> 0

std::uint64_t document_hash(const Document& doc) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the count pairs
  auto eat = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  for (const auto& [v, c] : doc.counts) {
    eat(static_cast<std::uint64_t>(v));
    eat(static_cast<std::uint64_t>(c));
  }
  return h;
}

}  // namespace

double lpp(const std::vector<Document>& test_docs, const Matrix& beta_point,
           const Vector& alpha, const LppConfig& cfg) {
  if (test_docs.empty()) throw std::invalid_argument("lpp: empty test set");
  if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0)) throw std::invalid_argument("lpp: ratio in (0,1)");
  if (cfg.num_splits < 1) throw std::invalid_argument("lpp: num_splits >= 1");
  const int K = static_cast<int>(beta_point.rows());
  for (int k = 0; k < K; ++k) {
    if (std::abs(beta_point.row(k).sum() - 1.0) > 1e-6 ||
        (beta_point.row(k).array() < 0.0).any()) {
      throw std::invalid_argument("lpp: beta row " + std::to_string(k) + " is not a distribution");
    }
  }
  LogTopicMatrix logbeta{beta_point.array().max(kBetaFloor).log().matrix()};

  double split_sum = 0.0;
  for (int split = 0; split < cfg.num_splits; ++split) {
    const std::uint64_t split_seed =
        combine_seed(cfg.seed, static_cast<std::uint64_t>(split));
    std::vector<double> doc_values;
    doc_values.reserve(test_docs.size());
    for (const auto& doc : test_docs) {
      std::mt19937_64 rng(combine_seed(split_seed, document_hash(doc)));
      const HoldoutSplit parts = split_holdout(doc, cfg.ratio, rng);
      const LocalPosterior post = local_vb(parts.obs, logbeta, alpha, cfg.local_vb);
      const Vector theta = post.gamma / post.gamma.sum();
      double token_sum = 0.0;
      int ho_tokens = 0;
      for (const auto& [v, c] : parts.ho.counts) {
        const double p = theta.dot(beta_point.col(v).cwiseMax(kBetaFloor));
        token_sum += c * std::log(p);
        ho_tokens += c;
      }
      doc_values.push_back(token_sum / ho_tokens);
    }
    // summing in sorted order makes the mean independent of document order
    std::sort(doc_values.begin(), doc_values.end());
    double doc_sum = 0.0;
    for (const double v : doc_values) doc_sum += v;
    split_sum += doc_sum / static_cast<double>(test_docs.size());
  }
  return split_sum / cfg.num_splits;
}

double npmi(const std::vector<std::vector<int>>& topics, const std::vector<Document>& corpus,
            const NpmiConfig& cfg) {
  if (topics.empty()) throw std::invalid_argument("npmi: no topics");
  if (corpus.empty()) throw std::invalid_argument("npmi: empty corpus");
  if (cfg.top_t < 2) throw std::invalid_argument("npmi: top_t must be >= 2");

  // presence sets over distinct terms, one per document
  std::vector<std::unordered_set<int>> presence;
  presence.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::unordered_set<int> s;
    for (const auto& [v, c] : doc.counts) s.insert(v);
    presence.push_back(std::move(s));
  }
  const double D = static_cast<double>(corpus.size());
  const double logD = std::log(D);

  auto doc_freq = [&](int w) {
    int n = 0;
    for (const auto& s : presence) n += s.count(w) ? 1 : 0;
    return n;
  };
  auto joint_freq = [&](int wi, int wj) {
    int n = 0;
    for (const auto& s : presence) n += (s.count(wi) && s.count(wj)) ? 1 : 0;
    return n;
  };

  double topic_sum = 0.0;
  for (const auto& words : topics) {
    const int t = std::min(static_cast<int>(words.size()), cfg.top_t);
    if (t < 2) throw std::invalid_argument("npmi: a topic has fewer than 2 words");
    std::vector<double> log_freq(t);
    for (int i = 0; i < t; ++i) log_freq[i] = std::log(static_cast<double>(doc_freq(words[i])));
    double pair_sum = 0.0;
    for (int i = 1; i < t; ++i) {
      for (int j = 0; j < i; ++j) {
        const double joint = joint_freq(words[i], words[j]) + cfg.smoothing;
        pair_sum += -1.0 + (2.0 * logD - log_freq[i] - log_freq[j]) / (logD - std::log(joint));
      }
    }
    topic_sum += 2.0 / (t * (t - 1.0)) * pair_sum;
  }
  return topic_sum / static_cast<double>(topics.size());
}

std::vector<std::vector<int>> top_words(const Matrix& beta_point, int t) {
  const int V = static_cast<int>(beta_point.cols());
  if (t > V) {
    throw std::invalid_argument("top_words: t=" + std::to_string(t) + " exceeds vocabulary " +
                                std::to_string(V));
  }
  if (t < 1) throw std::invalid_argument("top_words: t must be >= 1");
  std::vector<std::vector<int>> out;
  out.reserve(beta_point.rows());
  for (int k = 0; k < beta_point.rows(); ++k) {
    std::vector<int> ids(V);
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      if (beta_point(k, a) != beta_point(k, b)) return beta_point(k, a) > beta_point(k, b);
      return a < b;
    });
    ids.resize(t);
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<std::vector<std::string>> top_word_tokens(const Matrix& beta_point,
                                                      const Vocabulary& vocab, int t) {
  const auto ids = top_words(beta_point, t);
  std::vector<std::vector<std::string>> out;
  out.reserve(ids.size());
  for (const auto& topic : ids) {
    std::vector<std::string> tokens;
    tokens.reserve(topic.size());
    for (int v : topic) tokens.push_back(vocab.tokens.at(v));
    out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace gctm
