#pragma once

#include <optional>

#include "kernel/proof.hpp"
#include "kernel/rule.hpp"
#include "kernel/term.hpp"
#include "kernel/verifier.hpp"

namespace stp::kernel {

// Breadth-first proof search: explores every (rule, side, path, direction)
// rewrite from the goal, closing with refl or eval. Returns a proof with the
// fewest rewrite steps, ties broken by enumerating moves in (rule name, side,
// path, direction) lexicographic order with forward before backward. Intended
// as a test oracle; max_depth above 6 is rejected with ConfigError.
std::optional<Proof> brute_force_prove(const Statement& statement, int max_depth,
                                       const RuleLibrary& library,
                                       const TermLimits& limits = {});

}  // namespace stp::kernel
