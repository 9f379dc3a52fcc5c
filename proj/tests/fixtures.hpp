#pragma once

// Text-file fixtures for harness and CLI tests.

#include <string>
#include <vector>

#include "gctm/corpus.hpp"
#include "gctm/graph.hpp"

namespace fixtures {

inline std::string vocab_text(int V) {
  std::string out;
  for (int v = 0; v < V; ++v) out += "w" + std::to_string(v) + "\n";
  return out;
}

inline std::string corpus_text(const std::vector<gctm::Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d.label ? *d.label : "-";
    out += '\t';
    out += d.timestamp ? std::to_string(*d.timestamp) : "-";
    out += '\t';
    bool first = true;
    for (const auto& [v, c] : d.counts) {
      if (!first) out += ' ';
      out += std::to_string(v) + ":" + std::to_string(c);
      first = false;
    }
    out += '\n';
  }
  return out;
}

inline std::string edges_text(const gctm::KnowledgeGraph& g) {
  std::string out;
  for (const auto& e : g.edges) {
    out += std::to_string(e.i) + " " + std::to_string(e.j) + " " + std::to_string(e.w) + "\n";
  }
  return out;
}

}  // namespace fixtures
