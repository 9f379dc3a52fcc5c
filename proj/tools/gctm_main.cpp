#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <CLI11.hpp>

#include "gctm/checkpoint.hpp"
#include "gctm/harness.hpp"

namespace {

using namespace gctm;

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& preset,
                      std::string& label_order_csv) {
  cmd->add_option("--vocab", cfg.vocab_path, "vocabulary file, one token per line")->required();
  cmd->add_option("--corpus", cfg.corpus_path, "corpus file")->required();
  cmd->add_option("--graph", cfg.graph_path, "knowledge-graph edge list (gctm only)");
  cmd->add_option("--features", cfg.features, "identity or a feature file path");
  cmd->add_option("--feature-dim", cfg.feature_dim, "feature dimension M for a feature file");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--model", cfg.model, "gctm|svb|svbpp|pvb");
  cmd->add_option("--preset", preset, "named hyperparameter preset");
  cmd->add_option("-K,--topics", cfg.K, "number of topics");
  cmd->add_option("--alpha", cfg.alpha, "Dirichlet prior on topic proportions");
  cmd->add_option("--eta", cfg.eta, "Dirichlet prior on topics (baselines)");
  cmd->add_option("--sigma", cfg.sigma, "transition stddev sigma_beta = sigma_w");
  cmd->add_option("--rho-pp", cfg.rho_pp, "SVB-PP power-prior weight");
  cmd->add_option("--tau0", cfg.tau0, "PVB decay offset");
  cmd->add_option("--kappa", cfg.kappa, "PVB forgetting factor");
  cmd->add_option("--population", cfg.population, "PVB population size S");
  cmd->add_option("--lr", cfg.lr, "Adam learning rate");
  cmd->add_option("--inner-steps", cfg.inner_steps, "Adam iterations per minibatch");
  cmd->add_option("--hidden-dim", cfg.hidden_dim, "GCN hidden width (0 = K)");
  cmd->add_option("--layers", cfg.layers, "GCN layer count");
  cmd->add_option("--rho-init", cfg.rho_init, "initial effective rho");
  cmd->add_flag("--squash-rho,!--no-squash-rho", cfg.squash_rho,
                "map rho through a (0,1) squashing (default on)");
  cmd->add_option("--batch-size", cfg.batch_size, "minibatch size");
  cmd->add_option("--min-test-len", cfg.min_test_len, "minimum test-document length");
  cmd->add_option("--test-size", cfg.test_size, "holdout test-set size (0 = 10%)");
  cmd->add_option("--holdout-per-class", cfg.holdout_per_class,
                  "drift holdout size per class (0 = 10%)");
  cmd->add_option("--seed", cfg.seed, "run seed");
  cmd->add_option("--lpp-splits", cfg.lpp_splits, "random splits averaged by LPP");
  cmd->add_option("--lpp-ratio", cfg.lpp_ratio, "observed fraction for LPP splits");
  cmd->add_option("--vb-tol", cfg.vb_tol, "LocalVB convergence tolerance");
  cmd->add_option("--vb-max-iter", cfg.vb_max_iter, "LocalVB iteration cap");
  cmd->add_option("--top-t", cfg.top_t, "top words per topic");
  cmd->add_option("--label-order", label_order_csv, "comma-separated class labels");
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Preset first, then any explicitly passed flag wins.
void finalize_config(CLI::App* cmd, RunConfig& cfg, const std::string& preset,
                     const std::string& label_order_csv) {
  if (!preset.empty()) {
    RunConfig base;
    apply_preset(base, preset);
    if (cmd->count("--topics") == 0 && cmd->count("-K") == 0) cfg.K = base.K;
    if (cmd->count("--batch-size") == 0) cfg.batch_size = base.batch_size;
    if (cmd->count("--sigma") == 0) cfg.sigma = base.sigma;
    if (cmd->count("--rho-pp") == 0) cfg.rho_pp = base.rho_pp;
    if (cmd->count("--kappa") == 0) cfg.kappa = base.kappa;
    if (cmd->count("--population") == 0) cfg.population = base.population;
  }
  cfg.label_order = split_csv(label_order_csv);
}

int run_topics(const std::string& checkpoint_path, const std::string& vocab_path,
               const std::string& graph_path, const std::string& features_arg,
               int feature_dim, int t) {
  const Vocabulary vocab = load_vocabulary(vocab_path);
  Matrix point;
  if (checkpoint_kind(checkpoint_path) == "gctm") {
    const GctmState state = load_checkpoint(checkpoint_path);
    if (graph_path.empty()) {
      throw std::runtime_error("a gctm checkpoint needs --graph to rebuild the topics");
    }
    const NormalizedAdjacency adj = normalize(load_edge_list(graph_path, vocab.size()));
    const FeatureMatrix features =
        features_arg == "identity" ? identity_features(vocab.size())
                                   : load_features(features_arg, vocab.size(), feature_dim);
    point = point_estimate(state, features, adj).prob;
  } else {
    const DirichletGlobal lambda = load_baseline_checkpoint(checkpoint_path);
    point = dirichlet_mean(lambda);
  }
  const auto topics = top_word_tokens(point, vocab, std::min(t, vocab.size()));
  for (const auto& topic : topics) {
    for (std::size_t i = 0; i < topic.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << topic[i];
    }
    std::cout << '\n';
  }
  return 0;
}

int run_eval_npmi(const std::string& topics_path, const std::string& vocab_path,
                  const std::string& corpus_path, int top_t) {
  const Vocabulary vocab = load_vocabulary(vocab_path);
  const auto docs = load_corpus(corpus_path, vocab);
  std::unordered_map<std::string, int> ids;
  for (int i = 0; i < vocab.size(); ++i) ids[vocab.tokens[i]] = i;

  std::ifstream in(topics_path);
  if (!in) throw std::runtime_error("cannot open topics file " + topics_path);
  std::vector<std::vector<int>> topics;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<int> topic;
    std::string token;
    while (ls >> token) {
      const auto it = ids.find(token);
      if (it == ids.end()) throw std::runtime_error("token not in vocabulary: " + token);
      topic.push_back(it->second);
    }
    topics.push_back(std::move(topic));
  }
  NpmiConfig cfg;
  if (top_t > 0) {
    cfg.top_t = top_t;
  } else {
    cfg.top_t = 2;
    for (const auto& topic : topics) {
      cfg.top_t = std::max(cfg.top_t, static_cast<int>(topic.size()));
    }
  }
  std::printf("%.10g\n", npmi(topics, docs, cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming topic models with knowledge-graph priors"};
  app.require_subcommand(1);

  RunConfig train_cfg, drift_cfg;
  std::string train_preset, drift_preset;
  std::string train_labels, drift_labels;

  auto* train = app.add_subcommand("train", "train one model under a streaming scenario");
  add_common_flags(train, train_cfg, train_preset, train_labels);
  train->add_option("--scenario", train_cfg.scenario, "fixed|timestamp|label");

  auto* drift = app.add_subcommand("drift", "concept-drift and forgetting experiment");
  add_common_flags(drift, drift_cfg, drift_preset, drift_labels);

  auto* topics = app.add_subcommand("topics", "print top words from a checkpoint");
  std::string ck_path, ck_vocab, ck_graph, ck_features = "identity";
  int ck_t = 20, ck_feature_dim = 0;
  topics->add_option("--checkpoint", ck_path, "checkpoint file")->required();
  topics->add_option("--vocab", ck_vocab, "vocabulary file")->required();
  topics->add_option("--graph", ck_graph, "edge list (needed for gctm checkpoints)");
  topics->add_option("--features", ck_features, "identity or a feature file path");
  topics->add_option("--feature-dim", ck_feature_dim, "feature dimension M");
  topics->add_option("--top-t", ck_t, "words per topic");

  auto* eval_npmi = app.add_subcommand("eval-npmi", "topic coherence of a topics file");
  std::string np_topics, np_vocab, np_corpus;
  int np_t = 0;
  eval_npmi->add_option("--topics-file", np_topics, "one line of tokens per topic")->required();
  eval_npmi->add_option("--vocab", np_vocab, "vocabulary file")->required();
  eval_npmi->add_option("--corpus", np_corpus, "corpus for co-occurrence counts")->required();
  eval_npmi->add_option("--top-t", np_t, "truncate each topic line (0 = keep all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      finalize_config(train, train_cfg, train_preset, train_labels);
      run_and_emit(train_cfg);
      return 0;
    }
    if (drift->parsed()) {
      finalize_config(drift, drift_cfg, drift_preset, drift_labels);
      drift_cfg.scenario = "label";
      emit_drift_outputs(run_drift(drift_cfg), drift_cfg);
      return 0;
    }
    if (topics->parsed()) {
      return run_topics(ck_path, ck_vocab, ck_graph, ck_features, ck_feature_dim, ck_t);
    }
    if (eval_npmi->parsed()) return run_eval_npmi(np_topics, np_vocab, np_corpus, np_t);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
