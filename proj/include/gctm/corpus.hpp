#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gctm {

struct Vocabulary {
  std::vector<std::string> tokens;  // token at index i has id i

  int size() const { return static_cast<int>(tokens.size()); }
};

// Sparse bag of words. `counts` holds (term id, count) pairs sorted by term
// id with no duplicate ids when built by the loaders; counts are >= 1.
struct Document {
  std::vector<std::pair<int, int>> counts;
  std::optional<std::string> label;
  std::optional<std::int64_t> timestamp;

  int length() const {
    int n = 0;
    for (const auto& [v, c] : counts) n += c;
    return n;
  }
};

struct Minibatch {
  std::vector<Document> docs;
  int index = 0;
};

struct HoldoutSplit {
  Document obs;
  Document ho;
};

Vocabulary load_vocabulary(const std::string& path);

// Lines: label<TAB>timestamp<TAB>id:count[ id:count]*  with `-` for an
// absent label or timestamp.
std::vector<Document> load_corpus(const std::string& path, const Vocabulary& vocab);

// Partition the document's token multiset uniformly at random; obs gets
// round(ratio * N_d) tokens (half-up), and each side keeps at least one
// token. Requires N_d >= 5.
HoldoutSplit split_holdout(const Document& doc, double ratio, std::mt19937_64& rng);

inline HoldoutSplit split_holdout(const Document& doc, std::mt19937_64& rng) {
  return split_holdout(doc, 0.8, rng);
}

std::vector<Minibatch> stream_fixed(std::vector<Document> docs, int batchsize,
                                    std::mt19937_64& rng);

std::vector<Minibatch> stream_timestamp(const std::vector<Document>& docs);

std::vector<Minibatch> stream_by_label(const std::vector<Document>& docs,
                                       const std::vector<std::string>& label_order,
                                       int batchsize);

}  // namespace gctm
