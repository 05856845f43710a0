#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "corpus/corpus.hpp"
#include "kernel/rule.hpp"
#include "selfplay/attempt.hpp"
#include "selfplay/config.hpp"
#include "selfplay/policyset.hpp"

namespace stp::selfplay {

// Builds the conjecturer's prompts from proved (statement, proof) pairs:
// extracts used lemmas, adds the trivial lemma with the configured
// probability, caps each lemma's share of the candidate list at
// max(1, floor(lemma_cap_frac * n)) by seeded subsampling, and de-duplicates
// (statement, lemma) pairs keeping the first occurrence.
std::vector<policy::PromptRecord> select_conjecturer_inputs(
    const std::vector<std::pair<kernel::Statement, kernel::Proof>>& proved_pairs,
    const RunConfig& config, std::uint64_t seed);

// Seeded uniform subset of size min(count, unproved_count); ascending order.
std::vector<std::size_t> cap_conjectures_indices(std::size_t count, std::size_t unproved_count,
                                                 std::uint64_t seed);

// Rejects conjectures identical to the seed statement and conjectures that
// close under a single refl or eval step.
bool triviality_filter_accepts(const kernel::Statement& conjecture,
                               const kernel::Statement& seed_statement,
                               const kernel::RuleLibrary& library);

// K independent proof samples per target, parsed and verified; exactly
// K * |targets| records in (target, sample) order. Unparseable completions
// become failed records, never errors. Deterministic in seed_base and
// unaffected by worker count.
std::vector<AttemptRecord> sample_and_verify(const std::vector<ProofTarget>& targets,
                                             const PolicySet& policies, int samples_per_target,
                                             const kernel::RuleLibrary& library,
                                             const RunConfig& config, std::uint64_t seed_base);

// E(c) = (minimum verified-proof length for the target) / (target text
// length), over targets with at least one verified attempt.
std::map<std::string, double> elegancy_scores(const std::vector<AttemptRecord>& attempts);

struct ConjecturerDatasetResult {
  std::vector<policy::WeightedExample> examples;
  int band_selected = 0;     // records passing pass-band + lemma-used + correct
  int distinct = 0;          // after de-duplication by conjecture
  int elegancy_removed = 0;  // lowest floor(q * N) scores dropped
  int weighted_zero = 0;     // survivors whose re-weighting mass is zero
};

// Full curation pipeline for the conjecturer dataset: pass-rate band
// (0, pass_band_max] with the prompt lemma used in the proof, de-duplication,
// elegancy filter, Wasserstein re-weighting against the unproved statements.
ConjecturerDatasetResult build_conjecturer_dataset(
    const std::vector<AttemptRecord>& attempts, const PassRateTable& rates,
    const std::vector<corpus::TaggedStatement>& unproved, const RunConfig& config, int iteration);

// Correct proofs of targets with pass rate strictly below prover_pass_max,
// de-duplicated by (target, proof) canonical text, weighted
// (1/v) * gamma^L * beta^T.
std::vector<policy::WeightedExample> build_prover_dataset(
    const std::vector<AttemptRecord>& attempts, const PassRateTable& rates,
    const RunConfig& config);

}  // namespace stp::selfplay
