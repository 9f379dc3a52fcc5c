#include "gctm/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "gctm/checkpoint.hpp"
#include "gctm/graph.hpp"

namespace gctm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// seed stream tags
constexpr std::uint64_t kSeedTestSample = 1;
constexpr std::uint64_t kSeedStream = 2;
constexpr std::uint64_t kSeedModelInit = 3;
constexpr std::uint64_t kSeedLpp = 4;

struct Preset {
  int K;
  int batch_size;      // 0 = leave as configured
  double sigma;        // GCTM
  double rho_pp;       // SVB-PP
  double kappa;        // PVB
  double population;   // PVB
};

const std::map<std::string, Preset>& preset_table() {
  // Per-dataset best grid-search settings; *-w2v variants carry the
  // embedding-graph sigma where it differs.
  static const std::map<std::string, Preset> table = {
      {"agnews",            {50, 1000, 1.0, 0.99, 0.9, 1e4}},
      {"agnews-w2v",        {50, 1000, 1.0, 0.99, 0.9, 1e4}},
      {"agnews-title",      {50, 1000, 1.0, 0.99, 0.9, 1e6}},
      {"agnews-title-w2v",  {50, 1000, 1.0, 0.99, 0.9, 1e6}},
      {"tmn",               {50, 500, 1.0, 0.99, 0.9, 1e3}},
      {"tmn-w2v",           {50, 500, 100.0, 0.99, 0.9, 1e3}},
      {"tmn-title",         {50, 500, 1.0, 0.99, 0.9, 1e3}},
      {"tmn-title-w2v",     {50, 500, 100.0, 0.99, 0.9, 1e3}},
      {"nyt-title",         {100, 5000, 100.0, 0.99, 0.9, 1e5}},
      {"nyt-title-w2v",     {100, 5000, 1.0, 0.99, 0.9, 1e5}},
      {"yahoo-title",       {100, 5000, 0.01, 0.99, 0.9, 1e6}},
      {"yahoo-title-w2v",   {100, 5000, 100.0, 0.99, 0.9, 1e6}},
      {"irishtimes-fixed",  {100, 5000, 0.01, 0.9, 0.9, 1e5}},
      {"irishtimes-timestamp", {100, 0, 0.01, 0.5, 0.5, 1e5}},
      {"twitter",           {100, 5000, 1.0, 0.99, 0.9, 1e6}},
      {"drift",             {100, 2000, 100.0, 0.9, 0.9, 1e6}},
      {"drift-w2v",         {100, 2000, 0.01, 0.9, 0.9, 1e6}},
  };
  return table;
}

// ---- streaming model wrappers -------------------------------------------

class StreamingModel {
 public:
  virtual ~StreamingModel() = default;
  virtual void train(const Minibatch& mb) = 0;
  virtual Matrix point() const = 0;
  virtual void save(const std::string& path) const = 0;
};

class GctmStreamingModel final : public StreamingModel {
 public:
  GctmStreamingModel(const RunConfig& cfg, int V, std::mt19937_64& rng) {
    if (cfg.graph_path.empty()) {
      throw std::runtime_error("model=gctm requires --graph");
    }
    const KnowledgeGraph g = load_edge_list(cfg.graph_path, V);
    adj_ = normalize(g);
    if (cfg.features == "identity") {
      features_ = identity_features(V);
    } else {
      if (cfg.feature_dim < 1) {
        throw std::runtime_error("--features <file> requires --feature-dim");
      }
      features_ = load_features(cfg.features, V, cfg.feature_dim);
    }
    GctmConfig mc;
    mc.K = cfg.K;
    mc.V = V;
    mc.layers = cfg.layers;
    mc.hidden_dim = cfg.hidden_dim;
    mc.input_dim = features_.is_identity() ? 0 : features_.cols();
    mc.sigma_beta = cfg.sigma;
    mc.sigma_w = cfg.sigma;
    mc.alpha = cfg.alpha;
    mc.rho_init = cfg.rho_init;
    mc.squash_rho = cfg.squash_rho;
    mc.inner_steps = cfg.inner_steps;
    mc.adam.lr = cfg.lr;
    mc.local_vb.tol = cfg.vb_tol;
    mc.local_vb.max_iter = cfg.vb_max_iter;
    state_ = GctmState::init(mc, rng);
  }

  void train(const Minibatch& mb) override { train_minibatch(state_, mb, features_, adj_); }
  Matrix point() const override { return point_estimate(state_, features_, adj_).prob; }
  void save(const std::string& path) const override { save_checkpoint(state_, path); }

 private:
  GctmState state_;
  FeatureMatrix features_;
  NormalizedAdjacency adj_;
};

class BaselineStreamingModel final : public StreamingModel {
 public:
  BaselineStreamingModel(const RunConfig& cfg, int V)
      : kind_(baseline_kind_from_string(cfg.model)), lambda_{Matrix::Constant(cfg.K, V, cfg.eta)} {
    config_.eta = cfg.eta;
    config_.rho_pp = cfg.rho_pp;
    config_.tau0 = cfg.tau0;
    config_.kappa = cfg.kappa;
    config_.population = cfg.population;
    config_.local_vb.tol = cfg.vb_tol;
    config_.local_vb.max_iter = cfg.vb_max_iter;
    alpha_ = Vector::Constant(cfg.K, cfg.alpha);
    K_ = cfg.K;
    V_ = V;
  }

  void train(const Minibatch& mb) override {
    lambda_ = baseline_minibatch_step(kind_, lambda_, mb, config_, alpha_, K_, V_);
    t_ = mb.index + 1;
  }
  Matrix point() const override { return dirichlet_mean(lambda_); }
  void save(const std::string& path) const override {
    save_baseline_checkpoint(lambda_, t_, path);
  }

 private:
  BaselineKind kind_;
  DirichletGlobal lambda_;
  BaselineConfig config_;
  Vector alpha_;
  int K_ = 0;
  int V_ = 0;
  std::int64_t t_ = 0;
};

std::unique_ptr<StreamingModel> make_model(const RunConfig& cfg, int V, std::mt19937_64& rng) {
  if (cfg.model == "gctm") return std::make_unique<GctmStreamingModel>(cfg, V, rng);
  return std::make_unique<BaselineStreamingModel>(cfg, V);
}

// ---- shared pieces -------------------------------------------------------

struct LoadedData {
  Vocabulary vocab;
  std::vector<Document> docs;
};

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  d.vocab = load_vocabulary(cfg.vocab_path);
  d.docs = load_corpus(cfg.corpus_path, d.vocab);
  if (d.docs.empty()) throw std::runtime_error("corpus is empty: " + cfg.corpus_path);
  return d;
}

LppConfig make_lpp_config(const RunConfig& cfg) {
  LppConfig l;
  l.ratio = cfg.lpp_ratio;
  l.num_splits = cfg.lpp_splits;
  l.seed = combine_seed(cfg.seed, kSeedLpp);
  l.local_vb.tol = cfg.vb_tol;
  l.local_vb.max_iter = cfg.vb_max_iter;
  return l;
}

std::vector<Document> filter_test_docs(const std::vector<Document>& docs, int min_len) {
  std::vector<Document> out;
  for (const auto& d : docs) {
    if (d.length() >= min_len) out.push_back(d);
  }
  return out;
}

// Sample `n` eligible documents (without replacement) as the holdout test
// set; everything else stays in the training pool.
void extract_holdout(std::vector<Document>& pool, std::vector<Document>& test, int n,
                     int min_len, std::mt19937_64& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].length() >= min_len) eligible.push_back(i);
  }
  const int take = std::min<int>(n, static_cast<int>(eligible.size()));
  // partial Fisher-Yates over the eligible index list
  std::vector<bool> picked(pool.size(), false);
  for (int i = 0; i < take; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(uniform_index(rng, eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
    picked[eligible[i]] = true;
  }
  std::vector<Document> rest;
  rest.reserve(pool.size() - take);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (picked[i] ? test : rest).push_back(std::move(pool[i]));
  }
  pool = std::move(rest);
}

RunOutcome run_stream_with_fixed_test(const RunConfig& cfg,
                                      const std::vector<Minibatch>& stream,
                                      const std::vector<Document>& test_docs,
                                      const std::vector<Document>& npmi_corpus,
                                      const Vocabulary& vocab) {
  if (stream.empty()) throw std::runtime_error("no training minibatches");
  if (test_docs.empty()) throw std::runtime_error("holdout test set is empty");
  std::mt19937_64 init_rng(combine_seed(cfg.seed, kSeedModelInit));
  auto model = make_model(cfg, vocab.size(), init_rng);
  const LppConfig lpp_cfg = make_lpp_config(cfg);
  const Vector alpha = Vector::Constant(cfg.K, cfg.alpha);

  RunOutcome out;
  out.vocab = vocab;
  for (const auto& mb : stream) {
    model->train(mb);
    out.eval.lpp_series.emplace_back(mb.index, lpp(test_docs, model->point(), alpha, lpp_cfg));
  }
  const Matrix point = model->point();
  out.eval.top_words = top_words(point, std::min(cfg.top_t, vocab.size()));
  NpmiConfig ncfg;
  ncfg.top_t = std::min(cfg.top_t, vocab.size());
  out.eval.npmi = npmi(out.eval.top_words, npmi_corpus, ncfg);
  auto shared = std::shared_ptr<StreamingModel>(std::move(model));
  out.save_model = [shared](const std::string& path) { shared->save(path); };
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json config_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["scenario"] = c.scenario;
  j["vocab"] = c.vocab_path;
  j["corpus"] = c.corpus_path;
  j["graph"] = c.graph_path;
  j["features"] = c.features;
  j["feature_dim"] = c.feature_dim;
  j["out_dir"] = c.out_dir;
  j["label_order"] = c.label_order;
  j["K"] = c.K;
  j["alpha"] = c.alpha;
  j["eta"] = c.eta;
  j["sigma"] = c.sigma;
  j["rho_pp"] = c.rho_pp;
  j["tau0"] = c.tau0;
  j["kappa"] = c.kappa;
  j["population"] = c.population;
  j["lr"] = c.lr;
  j["inner_steps"] = c.inner_steps;
  j["hidden_dim"] = c.hidden_dim;
  j["rho_init"] = c.rho_init;
  j["squash_rho"] = c.squash_rho;
  j["layers"] = c.layers;
  j["batch_size"] = c.batch_size;
  j["min_test_len"] = c.min_test_len;
  j["test_size"] = c.test_size;
  j["holdout_per_class"] = c.holdout_per_class;
  j["seed"] = c.seed;
  j["lpp_splits"] = c.lpp_splits;
  j["lpp_ratio"] = c.lpp_ratio;
  j["vb_tol"] = c.vb_tol;
  j["vb_max_iter"] = c.vb_max_iter;
  j["top_t"] = c.top_t;
  return j;
}

void prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw std::runtime_error("cannot create output directory " + cfg.out_dir + ": " +
                             (ec ? ec.message() : "not a directory"));
  }
}

std::string lpp_csv(const std::vector<std::pair<int, double>>& series) {
  std::string csv = "minibatch,lpp\n";
  for (const auto& [t, v] : series) {
    csv += std::to_string(t) + "," + format_double(v) + "\n";
  }
  return csv;
}

std::string topics_text(const std::vector<std::vector<int>>& topics, const Vocabulary& vocab) {
  std::string out;
  for (const auto& topic : topics) {
    for (std::size_t i = 0; i < topic.size(); ++i) {
      if (i) out += ' ';
      out += vocab.tokens.at(topic[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void apply_preset(RunConfig& config, const std::string& name) {
  const auto it = preset_table().find(name);
  if (it == preset_table().end()) {
    throw std::invalid_argument("unknown preset \"" + name + "\"");
  }
  const Preset& p = it->second;
  config.K = p.K;
  if (p.batch_size > 0) config.batch_size = p.batch_size;
  config.sigma = p.sigma;
  config.rho_pp = p.rho_pp;
  config.kappa = p.kappa;
  config.population = p.population;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, preset] : preset_table()) names.push_back(name);
  return names;
}

RunOutcome run_fixed(const RunConfig& cfg) {
  LoadedData data = load_data(cfg);
  const std::vector<Document> all_docs = data.docs;
  const int test_size =
      cfg.test_size > 0 ? cfg.test_size : std::max<int>(1, static_cast<int>(all_docs.size()) / 10);
  std::vector<Document> test_docs;
  std::mt19937_64 sample_rng(combine_seed(cfg.seed, kSeedTestSample));
  extract_holdout(data.docs, test_docs, test_size, cfg.min_test_len, sample_rng);
  if (data.docs.empty()) throw std::runtime_error("no training documents left after holdout");

  std::mt19937_64 stream_rng(combine_seed(cfg.seed, kSeedStream));
  const auto stream = stream_fixed(std::move(data.docs), cfg.batch_size, stream_rng);
  return run_stream_with_fixed_test(cfg, stream, test_docs, all_docs, data.vocab);
}

RunOutcome run_label(const RunConfig& cfg) {
  LoadedData data = load_data(cfg);
  const std::vector<Document> all_docs = data.docs;
  const int test_size =
      cfg.test_size > 0 ? cfg.test_size : std::max<int>(1, static_cast<int>(all_docs.size()) / 10);
  std::vector<Document> test_docs;
  std::mt19937_64 sample_rng(combine_seed(cfg.seed, kSeedTestSample));
  extract_holdout(data.docs, test_docs, test_size, cfg.min_test_len, sample_rng);
  if (data.docs.empty()) throw std::runtime_error("no training documents left after holdout");

  const auto stream = stream_by_label(data.docs, cfg.label_order, cfg.batch_size);
  return run_stream_with_fixed_test(cfg, stream, test_docs, all_docs, data.vocab);
}

RunOutcome run_timestamp(const RunConfig& cfg) {
  LoadedData data = load_data(cfg);
  const auto stream = stream_timestamp(data.docs);
  if (stream.size() < 2) {
    throw std::runtime_error("timestamp scenario needs at least 2 distinct timestamps");
  }
  std::mt19937_64 init_rng(combine_seed(cfg.seed, kSeedModelInit));
  auto model = make_model(cfg, data.vocab.size(), init_rng);
  const LppConfig lpp_cfg = make_lpp_config(cfg);
  const Vector alpha = Vector::Constant(cfg.K, cfg.alpha);

  RunOutcome out;
  out.vocab = data.vocab;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    model->train(stream[t]);
    if (t + 1 < stream.size()) {
      const auto next_test = filter_test_docs(stream[t + 1].docs, cfg.min_test_len);
      if (!next_test.empty()) {
        out.eval.lpp_series.emplace_back(stream[t].index,
                                         lpp(next_test, model->point(), alpha, lpp_cfg));
      }
    }
  }
  const Matrix point = model->point();
  out.eval.top_words = top_words(point, std::min(cfg.top_t, data.vocab.size()));
  NpmiConfig ncfg;
  ncfg.top_t = std::min(cfg.top_t, data.vocab.size());
  out.eval.npmi = npmi(out.eval.top_words, data.docs, ncfg);
  auto shared = std::shared_ptr<StreamingModel>(std::move(model));
  out.save_model = [shared](const std::string& path) { shared->save(path); };
  return out;
}

DriftReport run_drift(const RunConfig& cfg) {
  if (cfg.label_order.empty()) throw std::runtime_error("drift runs need --label-order");
  LoadedData data = load_data(cfg);
  const std::vector<Document> all_docs = data.docs;

  // per-class holdout test sets, extracted before streaming
  std::map<std::string, std::vector<Document>> class_docs;
  for (const auto& label : cfg.label_order) class_docs[label] = {};
  for (auto& doc : data.docs) {
    if (!doc.label || !class_docs.count(*doc.label)) {
      const std::string name = doc.label ? "\"" + *doc.label + "\"" : "(none)";
      throw std::runtime_error("drift: document label " + name + " not in label order");
    }
    class_docs[*doc.label].push_back(std::move(doc));
  }
  std::mt19937_64 sample_rng(combine_seed(cfg.seed, kSeedTestSample));
  std::map<std::string, std::vector<Document>> class_holdout;
  std::vector<Document> train_pool;
  for (const auto& label : cfg.label_order) {
    auto& pool = class_docs[label];
    const int want = cfg.holdout_per_class > 0
                         ? cfg.holdout_per_class
                         : std::max<int>(1, static_cast<int>(pool.size()) / 10);
    std::vector<Document> holdout;
    extract_holdout(pool, holdout, want, cfg.min_test_len, sample_rng);
    if (pool.empty()) {
      throw std::runtime_error("drift: class \"" + label +
                               "\" has no training documents after holdout extraction");
    }
    if (holdout.empty()) {
      throw std::runtime_error("drift: class \"" + label + "\" has no eligible holdout documents");
    }
    class_holdout[label] = std::move(holdout);
    for (auto& d : pool) train_pool.push_back(std::move(d));
  }

  const auto stream = stream_by_label(train_pool, cfg.label_order, cfg.batch_size);
  std::mt19937_64 init_rng(combine_seed(cfg.seed, kSeedModelInit));
  auto model = make_model(cfg, data.vocab.size(), init_rng);
  const LppConfig lpp_cfg = make_lpp_config(cfg);
  const Vector alpha = Vector::Constant(cfg.K, cfg.alpha);

  DriftReport report;
  report.outcome.vocab = data.vocab;
  std::string current_label;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const std::string& label = *stream[t].docs.front().label;
    if (label != current_label) {
      report.boundaries.emplace_back(stream[t].index, label);
      current_label = label;
    }
    model->train(stream[t]);
    if (t + 1 < stream.size()) {
      const auto next_test = filter_test_docs(stream[t + 1].docs, cfg.min_test_len);
      if (!next_test.empty()) {
        report.outcome.eval.lpp_series.emplace_back(
            stream[t].index, lpp(next_test, model->point(), alpha, lpp_cfg));
      }
    }
    const bool class_done =
        t + 1 == stream.size() || *stream[t + 1].docs.front().label != label;
    if (class_done) {
      // average LPP over the holdouts of this class and all previous ones
      const int class_index = static_cast<int>(report.forgetting.size());
      double sum = 0.0;
      int n = 0;
      const Matrix point = model->point();
      for (int c = 0; c <= class_index; ++c) {
        const auto& holdout = class_holdout[cfg.label_order[c]];
        sum += lpp(holdout, point, alpha, lpp_cfg);
        n += 1;
      }
      report.forgetting.push_back({class_index, label, sum / n});
    }
  }
  const Matrix point = model->point();
  report.outcome.eval.top_words = top_words(point, std::min(cfg.top_t, data.vocab.size()));
  NpmiConfig ncfg;
  ncfg.top_t = std::min(cfg.top_t, data.vocab.size());
  report.outcome.eval.npmi = npmi(report.outcome.eval.top_words, all_docs, ncfg);
  auto shared = std::shared_ptr<StreamingModel>(std::move(model));
  report.outcome.save_model = [shared](const std::string& path) { shared->save(path); };
  return report;
}

void emit_outputs(const RunOutcome& outcome, const RunConfig& config) {
  prepare_out_dir(config);
  const fs::path dir(config.out_dir);
  write_text_file((dir / "lpp.csv").string(), lpp_csv(outcome.eval.lpp_series));
  write_text_file((dir / "npmi.txt").string(), format_double(outcome.eval.npmi) + "\n");
  write_text_file((dir / "topics.txt").string(),
                  topics_text(outcome.eval.top_words, outcome.vocab));
  write_text_file((dir / "config.resolved").string(), config_json(config).dump(2) + "\n");
  outcome.save_model((dir / "checkpoint.bin").string());
}

void emit_drift_outputs(const DriftReport& report, const RunConfig& config) {
  emit_outputs(report.outcome, config);
  const fs::path dir(config.out_dir);
  std::string fcsv = "class_index,label,avg_lpp\n";
  for (const auto& row : report.forgetting) {
    fcsv += std::to_string(row.class_index) + "," + row.label + "," +
            format_double(row.avg_lpp) + "\n";
  }
  write_text_file((dir / "forgetting.csv").string(), fcsv);
  std::string bcsv = "minibatch,label\n";
  for (const auto& [t, label] : report.boundaries) {
    bcsv += std::to_string(t) + "," + label + "\n";
  }
  write_text_file((dir / "boundaries.csv").string(), bcsv);
}

void run_and_emit(const RunConfig& config) {
  if (config.scenario == "fixed") {
    emit_outputs(run_fixed(config), config);
  } else if (config.scenario == "timestamp") {
    emit_outputs(run_timestamp(config), config);
  } else if (config.scenario == "label") {
    emit_outputs(run_label(config), config);
  } else {
    throw std::invalid_argument("unknown scenario \"" + config.scenario + "\"");
  }
}

}  // namespace gctm
