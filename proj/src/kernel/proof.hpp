#pragma once

#include <string>
#include <vector>

#include "kernel/rule.hpp"
#include "kernel/term.hpp"

namespace stp::kernel {

enum class Side { left, right };

inline char side_char(Side s) { return s == Side::left ? 'L' : 'R'; }

struct ProofStep {
  enum class Kind { rewrite, refl, eval };

  Kind kind = Kind::refl;
  // rewrite fields
  Direction direction = Direction::forward;
  std::string rule_name;
  Side side = Side::left;
  Path path;

  static ProofStep rw(Direction dir, std::string rule, Side side, Path path) {
    ProofStep s;
    s.kind = Kind::rewrite;
    s.direction = dir;
    s.rule_name = std::move(rule);
    s.side = side;
    s.path = std::move(path);
    return s;
  }
  static ProofStep refl() { return ProofStep{}; }
  static ProofStep eval() {
    ProofStep s;
    s.kind = Kind::eval;
    return s;
  }

  std::string text() const;
  bool operator==(const ProofStep& other) const;
};

struct Proof {
  std::vector<ProofStep> steps;

  // Steps joined by "; ". The proof length L used by training weights is the
  // character count of this serialization.
  std::string text() const;
  int length() const { return static_cast<int>(text().size()); }
  bool operator==(const Proof& other) const { return steps == other.steps; }
};

// Parses "rw [<-] name at L|R [i, j]; ...; refl|eval".
// Throws ParseError for malformed input, StructureError when the step list is
// empty or Refl/Eval placement violates the terminal rule, LimitError when a
// path is longer than the depth bound.
Proof parse_proof(std::string_view text, const TermLimits& limits = {});

}  // namespace stp::kernel
