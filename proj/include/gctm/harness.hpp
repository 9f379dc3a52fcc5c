#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gctm/baselines.hpp"
#include "gctm/eval.hpp"
#include "gctm/model.hpp"

namespace gctm {

// Complete description of one experiment run; serialized verbatim into the
// output directory so the run can be reproduced from it.
struct RunConfig {
  std::string model = "gctm";     // gctm | svb | svbpp | pvb
  std::string scenario = "fixed"; // fixed | timestamp | label
  std::string vocab_path;
  std::string corpus_path;
  std::string graph_path;         // required for model=gctm
  std::string features = "identity";  // identity | path to a feature file
  int feature_dim = 0;            // M when features come from a file
  std::string out_dir = "out";
  std::vector<std::string> label_order;

  int K = 50;
  double alpha = 0.01;
  double eta = 0.01;
  double sigma = 1.0;             // sigma_beta = sigma_w
  double rho_pp = 0.9;
  double tau0 = 1.0;
  double kappa = 0.9;
  double population = 1e4;        // PVB's S
  double lr = 0.01;
  int inner_steps = 100;
  int hidden_dim = 0;             // 0 = K
  double rho_init = 0.5;
  bool squash_rho = true;
  int layers = 2;

  int batch_size = 500;
  int min_test_len = 5;
  int test_size = 0;              // fixed/label scenarios; 0 = 10% of the corpus
  int holdout_per_class = 0;      // drift; 0 = 10% of the class
  std::uint64_t seed = 42;

  int lpp_splits = 5;
  double lpp_ratio = 0.8;
  double vb_tol = 1e-5;
  int vb_max_iter = 50;
  int top_t = 20;
};

// Fill model hyperparameters from a named preset; explicit flags are applied
// on top by the CLI. Throws on unknown names.
void apply_preset(RunConfig& config, const std::string& name);
std::vector<std::string> preset_names();

// Result of a run plus what emit_outputs needs to finish the job: the
// loaded vocabulary and a closure that checkpoints the trained model.
struct RunOutcome {
  EvalReport eval;
  Vocabulary vocab;
  std::function<void(const std::string&)> save_model;
};

struct DriftReport {
  RunOutcome outcome;  // next-minibatch LPP series, NPMI, top words
  struct ForgettingRow {
    int class_index;
    std::string label;
    double avg_lpp;  // over holdouts of this class and all previous ones
  };
  std::vector<ForgettingRow> forgetting;
  std::vector<std::pair<int, std::string>> boundaries;  // first minibatch of each class
};

// Fixed holdout test set, shuffled minibatches, LPP after every minibatch.
RunOutcome run_fixed(const RunConfig& config);

// Label-ordered stream with the same fixed-holdout evaluation protocol.
RunOutcome run_label(const RunConfig& config);

// One minibatch per timestamp; LPP of minibatch t is measured on t+1.
RunOutcome run_timestamp(const RunConfig& config);

// Label-ordered stream with next-minibatch LPP and per-class forgetting.
DriftReport run_drift(const RunConfig& config);

// Writes lpp.csv, npmi.txt, topics.txt, config.resolved and checkpoint.bin
// into config.out_dir. The drift variant adds forgetting.csv and
// boundaries.csv.
void emit_outputs(const RunOutcome& outcome, const RunConfig& config);
void emit_drift_outputs(const DriftReport& report, const RunConfig& config);

// Scenario dispatch used by the CLI `train` subcommand; runs, then emits.
void run_and_emit(const RunConfig& config);

}  // namespace gctm
