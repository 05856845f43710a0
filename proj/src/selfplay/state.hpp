#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kernel/term.hpp"
#include "policy/prompt.hpp"
#include "selfplay/attempt.hpp"
#include "util/jsonio.hpp"

namespace stp::selfplay {

struct StoredProof {
  std::string proof_text;
  int length = 0;
  long long cost = 0;
};

struct ProvedEntry {
  kernel::Statement statement;
  std::vector<StoredProof> proofs;  // distinct, capped, first-come order
  int first_iteration = 0;
};

// One retained correct proof for refresh / final re-training. Only proofs
// whose target pass rate at generation time is within the re-training bound
// are stored; the selection step re-applies the bound anyway.
struct HistoryEntry {
  AttemptKind kind = AttemptKind::dataset_statement;
  std::string target_text;
  std::string proof_text;
  int length = 0;
  long long cost = 0;
  double pass_rate = 0.0;  // empirical pass rate at the generating iteration
  int iteration = 0;
};

// Everything a run needs to continue exactly where it stopped, minus the
// model snapshots (stored as separate files). Serialization is canonical.
struct RunState {
  int iteration = 0;
  long long cumulative_proofs = 0;

  std::map<std::string, ProvedEntry> proved;  // key: statement canonical text
  std::vector<HistoryEntry> history;
  std::set<std::string> history_keys;  // target \x1f proof

  std::deque<std::vector<policy::WeightedExample>> replay;  // oldest first

  // expert-iteration baselines: distinct correct proofs per statement text,
  // first-come order (vanilla trains on all of them; optimized takes a seeded
  // per-statement subset each iteration)
  std::map<std::string, std::vector<StoredProof>> ei_proofs;

  util::Json to_json() const;
  static RunState from_json(const util::Json& j);
};

}  // namespace stp::selfplay
