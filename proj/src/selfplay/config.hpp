#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "kernel/term.hpp"
#include "util/jsonio.hpp"

namespace stp::selfplay {

// All run parameters. The config file is a flat JSON object whose keys are
// exactly these field names; CLI flags override file values and the STP_SEED
// environment variable overrides both.
struct RunConfig {
  // sampling budgets
  int K = 32;
  int K_baseline = 64;

  // training weights
  double gamma = std::exp(-0.001);  // length discount, weight gamma^L
  double beta = std::exp(-0.01);    // verification-cost discount, weight beta^T

  // curation thresholds
  double pass_band_max = 0.25;        // conjecturer band (0, pass_band_max]
  double prover_pass_max = 0.5;       // strict upper bound for prover proofs
  double elegancy_quantile = 0.2;     // lowest fraction removed
  double cap = 3.0;                   // re-weighting mask threshold
  int replay_iters = 3;
  int refresh_every = 10;
  double lemma_cap_frac = 0.1;        // per-lemma share of conjecturer inputs
  double trivial_lemma_prob = 0.5;
  double final_retrain_pass_max = 0.25;
  int max_proofs_per_statement = 16;

  // generation
  double conjecturer_temperature = 1.0;
  double prover_temperature = 1.0;
  int max_tokens = 256;
  long long step_budget = 10000;
  std::uint64_t seed = 0;

  // policy model
  int ngram_order = 4;
  double alpha = 0.1;
  bool split_roles = false;  // two separate role models instead of one shared
  // Multiplier on SFT example weights when (re)building count tables. The
  // count-model analog of the fine-tuning learning rate: values below 1 let
  // fresh self-play data move the distribution further from the SFT prior.
  double sft_scale = 1.0;

  // kernel limits
  int max_term_depth = 16;
  std::uint64_t max_literal = 1000000;

  // execution
  int workers = 0;  // 0 = hardware concurrency

  // per-source matching weights for re-weighting; the _after table takes over
  // once iteration > matching_weights_switch_iter (0 = never switch)
  std::map<std::string, int> matching_weights{{"main", 1}};
  std::map<std::string, int> matching_weights_after{};
  int matching_weights_switch_iter = 0;

  // inputs
  std::string dataset_path;        // statements tagged "main"
  std::string valid_dataset_path;  // optional second source tagged "valid"
  std::string sft_dir;
  std::string rules_path;  // empty = built-in library

  kernel::TermLimits term_limits() const {
    return kernel::TermLimits{max_term_depth, max_literal};
  }

  int matching_weight(const std::string& source, int iteration) const;

  void validate() const;

  util::Json to_json() const;
  static RunConfig from_json(const util::Json& j);
  static RunConfig load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

}  // namespace stp::selfplay
