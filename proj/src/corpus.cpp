#include "gctm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "gctm/util.hpp"

namespace gctm {

namespace {

std::runtime_error corpus_error(const std::string& path, int line, const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

Document aggregate_counts(std::map<int, int>&& counts) {
  Document d;
  d.counts.assign(counts.begin(), counts.end());
  return d;
}

}  // namespace

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file " + path);
  Vocabulary vocab;
  std::unordered_map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      // a trailing newline produces no empty token; anything else is malformed
      if (in.peek() == EOF) break;
      throw corpus_error(path, lineno, "blank line in vocabulary");
    }
    auto [it, inserted] = seen.emplace(line, lineno);
    if (!inserted) {
      throw corpus_error(path, lineno,
                         "duplicate token \"" + line + "\" (first at line " +
                             std::to_string(it->second) + ")");
    }
    vocab.tokens.push_back(line);
    ++lineno;
  }
  if (vocab.tokens.empty()) throw std::runtime_error(path + ": empty vocabulary");
  return vocab;
}

std::vector<Document> load_corpus(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  const int V = vocab.size();
  std::vector<Document> docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == EOF) break;
    std::istringstream ls(line);
    std::string label, ts, rest;
    if (!std::getline(ls, label, '\t') || !std::getline(ls, ts, '\t')) {
      throw corpus_error(path, lineno, "expected label<TAB>timestamp<TAB>pairs");
    }
    std::getline(ls, rest);  // empty pair section is caught below
    Document doc;
    if (label != "-") doc.label = label;
    if (ts != "-") {
      try {
        std::size_t pos = 0;
        doc.timestamp = std::stoll(ts, &pos);
        if (pos != ts.size()) throw std::invalid_argument(ts);
      } catch (const std::exception&) {
        throw corpus_error(path, lineno, "bad timestamp \"" + ts + "\"");
      }
    }
    std::istringstream ps(rest);
    std::string pair;
    std::map<int, int> counts;
    while (ps >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == pair.size()) {
        throw corpus_error(path, lineno, "malformed pair \"" + pair + "\"");
      }
      int v = 0, c = 0;
      try {
        std::size_t p1 = 0, p2 = 0;
        v = std::stoi(pair.substr(0, colon), &p1);
        c = std::stoi(pair.substr(colon + 1), &p2);
        if (p1 != colon || p2 != pair.size() - colon - 1) throw std::invalid_argument(pair);
      } catch (const std::exception&) {
        throw corpus_error(path, lineno, "malformed pair \"" + pair + "\"");
      }
      if (v < 0 || v >= V) {
        throw corpus_error(path, lineno,
                           "term id " + std::to_string(v) + " out of range (V=" +
                               std::to_string(V) + ")");
      }
      if (c <= 0) throw corpus_error(path, lineno, "count must be positive in \"" + pair + "\"");
      if (!counts.emplace(v, c).second) {
        throw corpus_error(path, lineno, "duplicate term id " + std::to_string(v));
      }
    }
    if (counts.empty()) throw corpus_error(path, lineno, "document has no words");
    Document built = aggregate_counts(std::move(counts));
    built.label = doc.label;
    built.timestamp = doc.timestamp;
    docs.push_back(std::move(built));
    ++lineno;
  }
  return docs;
}

HoldoutSplit split_holdout(const Document& doc, double ratio, std::mt19937_64& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0,1)");
  const int n = doc.length();
  if (n < 5) {
    throw std::runtime_error("split_holdout: document has " + std::to_string(n) +
                             " tokens, need at least 5");
  }
  std::vector<int> tokens;
  tokens.reserve(n);
  for (const auto& [v, c] : doc.counts) {
    for (int i = 0; i < c; ++i) tokens.push_back(v);
  }
  seeded_shuffle(tokens, rng);
  int n_obs = static_cast<int>(std::floor(ratio * n + 0.5));
  if (n_obs >= n) n_obs = n - 1;  // keep ho non-empty
  if (n_obs < 1) n_obs = 1;       // keep obs non-empty
  std::map<int, int> obs_counts, ho_counts;
  for (int i = 0; i < n; ++i) {
    (i < n_obs ? obs_counts : ho_counts)[tokens[i]] += 1;
  }
  HoldoutSplit split;
  split.obs = aggregate_counts(std::move(obs_counts));
  split.ho = aggregate_counts(std::move(ho_counts));
  return split;
}

namespace {

std::vector<Minibatch> chunk(std::vector<Document> docs, int batchsize, int first_index) {
  std::vector<Minibatch> out;
  const std::size_t step = static_cast<std::size_t>(batchsize);
  for (std::size_t i = 0; i < docs.size(); i += step) {
    Minibatch mb;
    mb.index = first_index + static_cast<int>(out.size());
    const std::size_t end = std::min(docs.size(), i + step);
    mb.docs.assign(std::make_move_iterator(docs.begin() + i),
                   std::make_move_iterator(docs.begin() + end));
    out.push_back(std::move(mb));
  }
  return out;
}

}  // namespace

std::vector<Minibatch> stream_fixed(std::vector<Document> docs, int batchsize,
                                    std::mt19937_64& rng) {
  if (batchsize < 1) throw std::invalid_argument("batchsize must be >= 1");
  seeded_shuffle(docs, rng);
  return chunk(std::move(docs), batchsize, 0);
}

std::vector<Minibatch> stream_timestamp(const std::vector<Document>& docs) {
  std::map<std::int64_t, std::vector<Document>> groups;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!docs[i].timestamp) {
      throw std::runtime_error("stream_timestamp: document " + std::to_string(i) +
                               " has no timestamp");
    }
    groups[*docs[i].timestamp].push_back(docs[i]);
  }
  std::vector<Minibatch> out;
  for (auto& [ts, group] : groups) {
    Minibatch mb;
    mb.index = static_cast<int>(out.size());
    mb.docs = std::move(group);
    out.push_back(std::move(mb));
  }
  return out;
}

std::vector<Minibatch> stream_by_label(const std::vector<Document>& docs,
                                       const std::vector<std::string>& label_order,
                                       int batchsize) {
  if (batchsize < 1) throw std::invalid_argument("batchsize must be >= 1");
  std::unordered_map<std::string, std::vector<Document>> groups;
  for (const auto& label : label_order) groups.emplace(label, std::vector<Document>{});
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!docs[i].label || !groups.count(*docs[i].label)) {
      const std::string name = docs[i].label ? "\"" + *docs[i].label + "\"" : "(none)";
      throw std::runtime_error("stream_by_label: document " + std::to_string(i) +
                               " has label " + name + " not in label order");
    }
    groups[*docs[i].label].push_back(docs[i]);
  }
  std::vector<Minibatch> out;
  for (const auto& label : label_order) {
    auto chunks = chunk(std::move(groups[label]), batchsize, static_cast<int>(out.size()));
    for (auto& mb : chunks) out.push_back(std::move(mb));
  }
  return out;
}

}  // namespace gctm
