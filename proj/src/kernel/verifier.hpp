#pragma once

#include <optional>
#include <set>
#include <string>

#include "kernel/proof.hpp"
#include "kernel/rule.hpp"
#include "kernel/term.hpp"

namespace stp::kernel {

struct VerificationOutcome {
  bool verified = false;
  int failed_step = -1;          // step index for failures, -1 otherwise
  std::string failure_reason;    // empty when verified
  std::set<std::string> used_lemmas;
  long long cost = 0;            // primitive pattern-match attempts
  int steps_executed = 0;

  std::string verdict_text() const {
    if (verified) return "verified";
    if (failed_step >= 0)
      return "failed(step " + std::to_string(failed_step) + ": " + failure_reason + ")";
    return "failed(" + failure_reason + ")";
  }
};

inline constexpr long long kDefaultStepBudget = 10000;

// Replays the proof against the statement. Maintains a goal equation; each
// rewrite step transforms the chosen side at the given path; refl closes iff
// the sides are syntactically equal; eval closes iff both sides are ground and
// evaluate to the same natural number. Never throws: every failure mode,
// including unknown rule names and budget exhaustion, is reported in the
// outcome. Cost is the deterministic match-attempt counter and never exceeds
// the budget.
VerificationOutcome verify(const Statement& statement, const Proof& proof,
                           const RuleLibrary& library, long long step_budget = kDefaultStepBudget);

// Ground evaluation; nullopt when the term contains a variable or the value
// overflows 64 bits.
std::optional<std::uint64_t> evaluate_ground(const Term& term);

}  // namespace stp::kernel
