#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kernel/proof.hpp"
#include "kernel/term.hpp"
#include "kernel/verifier.hpp"
#include "util/jsonio.hpp"

namespace stp::selfplay {

enum class AttemptKind { dataset_statement, conjecture };

inline const char* attempt_kind_name(AttemptKind k) {
  return k == AttemptKind::dataset_statement ? "dataset-statement" : "conjecture";
}

// The (seed statement, seed proof, lemma) triple a conjecture came from.
struct ConjectureProvenance {
  kernel::Statement seed_statement;
  kernel::Proof seed_proof;
  std::string lemma;
};

// One proof target for an iteration's sampling phase.
struct ProofTarget {
  AttemptKind kind = AttemptKind::dataset_statement;
  kernel::Statement statement;
  std::string source;  // matching-weight tag for dataset statements
  std::optional<ConjectureProvenance> provenance;
};

// One sampled proof attempt with its verification outcome.
struct AttemptRecord {
  AttemptKind kind = AttemptKind::dataset_statement;
  std::optional<ConjectureProvenance> provenance;
  kernel::Statement target;
  std::string proof_text;              // raw model completion
  std::optional<kernel::Proof> proof;  // parsed form, when parseable
  kernel::VerificationOutcome outcome;
  int sample_index = 0;
  std::string source;

  bool verified() const { return outcome.verified; }
  // L: canonical proof length; 0 for unparseable completions.
  int proof_length() const { return proof ? proof->length() : 0; }

  util::Json to_json() const;
};

// Empirical pass rates per target canonical text.
class PassRateTable {
 public:
  void record(const std::string& target_text, bool success) {
    auto& cell = table_[target_text];
    ++cell.first;
    if (success) ++cell.second;
  }

  int attempts(const std::string& target_text) const {
    auto it = table_.find(target_text);
    return it == table_.end() ? 0 : it->second.first;
  }
  int successes(const std::string& target_text) const {
    auto it = table_.find(target_text);
    return it == table_.end() ? 0 : it->second.second;
  }
  // P-hat: successes / attempts; 0 for unknown targets.
  double pass_rate(const std::string& target_text) const {
    auto it = table_.find(target_text);
    if (it == table_.end() || it->second.first == 0) return 0.0;
    return static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
  }

  const std::map<std::string, std::pair<int, int>>& cells() const { return table_; }

 private:
  std::map<std::string, std::pair<int, int>> table_;  // text -> (attempts, successes)
};

PassRateTable compute_pass_rates(const std::vector<AttemptRecord>& attempts);

}  // namespace stp::selfplay
