#pragma once

#include <filesystem>
#include <vector>

#include "corpus/corpus.hpp"
#include "selfplay/curation.hpp"
#include "selfplay/state.hpp"

namespace stp::selfplay {

enum class RunMode { stp, expert_vanilla, expert_opt, parallel };

const char* run_mode_name(RunMode mode);
RunMode run_mode_from(const std::string& name);

// Everything produced by one iteration, for artifact files and reporting.
struct IterationArtifacts {
  int iteration = 0;
  std::vector<policy::PromptRecord> conjecturer_inputs;
  std::vector<util::Json> conjecture_log;  // one row per sampled conjecture
  int conjectures_generated = 0;           // completions sampled
  int conjectures_kept = 0;                // survived filters and the cap
  int unproved_count = 0;                  // at iteration start
  std::vector<ProofTarget> targets;        // kept conjectures then unproved statements
  std::vector<AttemptRecord> attempts;
  PassRateTable rates;
  ConjecturerDatasetResult conjecturer_dataset;
  std::vector<policy::WeightedExample> prover_dataset;
  int newly_proved = 0;
};

struct StepContext {
  const kernel::RuleLibrary& library;
  const RunConfig& config;
  const std::vector<corpus::TaggedStatement>& dataset;
};

// One self-play iteration: conjecture, prove, curate, retrain. `base` is the
// count snapshot retraining builds on (the SFT counts until a refresh
// replaces them). Mutates state and current in place; the caller owns
// rollback on exceptions.
IterationArtifacts stp_iteration(RunState& state, PolicySet& current, const PolicySet& base,
                                 const StepContext& ctx);

// Expert iteration baselines. Vanilla samples only unproved statements and
// retrains from the SFT base on every correct proof ever generated.
// Optimized samples every statement and retrains from the SFT base on at most
// max_proofs_per_statement distinct proofs per statement from the current
// iteration. No conjecturing in either variant.
IterationArtifacts expert_iteration_step(RunState& state, PolicySet& current,
                                         const PolicySet& sft_base, const StepContext& ctx,
                                         bool optimized);

// Frozen-model sampling over the unproved statements; only the proved set and
// counters change.
IterationArtifacts parallel_sampling_step(RunState& state, const PolicySet& current,
                                          const StepContext& ctx);

// Re-training data rule shared by periodic_refresh and final_retrain: every
// stored correct proof whose generation-time pass rate is within
// final_retrain_pass_max, at most max_proofs_per_statement seeded-chosen
// distinct proofs per target (targets visited in ascending text order),
// weighted (1/v) * gamma^L * beta^T.
std::vector<policy::WeightedExample> retraining_dataset(const RunState& state,
                                                        const RunConfig& config, int iteration);

// Rebuilds the model from the SFT counts plus the retraining dataset.
// Installs the rebuilt model as both the new base and the current model and
// clears the replay buffer.
void periodic_refresh(RunState& state, PolicySet& base, PolicySet& current,
                      const std::vector<policy::WeightedExample>& sft_examples,
                      const StepContext& ctx);

// Same data rule as periodic_refresh over the full run history; returns the
// re-trained model without touching the state.
PolicySet final_retrain(const RunState& state,
                        const std::vector<policy::WeightedExample>& sft_examples,
                        const StepContext& ctx);

// Orchestrates a run directory: config.json, state.json, model snapshots,
// per-iteration artifact files and report rows; supports exact resume.
class Runner {
 public:
  Runner(std::filesystem::path run_dir, const RunConfig& config, RunMode mode, bool resume);

  // Runs iterations until state().iteration == target_iterations.
  void run_to(int target_iterations);

  const RunState& state() const { return state_; }
  const RunConfig& config() const { return config_; }
  const std::vector<corpus::TaggedStatement>& dataset() const { return dataset_; }
  const PolicySet& current_model() const { return current_; }

  PolicySet final_retrain_model() const;

  static std::filesystem::path iteration_dir(const std::filesystem::path& run_dir, int iteration);

 private:
  void init_fresh();
  void load_existing();
  void write_artifacts(const IterationArtifacts& artifacts);
  void persist();

  std::filesystem::path run_dir_;
  RunConfig config_;
  RunMode mode_;
  kernel::RuleLibrary library_;
  std::vector<corpus::TaggedStatement> dataset_;
  std::vector<policy::WeightedExample> sft_examples_;
  RunState state_;
  PolicySet sft_base_;
  PolicySet base_;
  PolicySet current_;
};

// Loads conjecturer_sft.jsonl + prover_sft.jsonl from an `sft` output dir.
std::vector<policy::WeightedExample> load_sft_examples(const std::filesystem::path& sft_dir);

}  // namespace stp::selfplay
