#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kernel/term.hpp"

namespace stp::kernel {

// A named, oriented pattern equation over metavariables X, Y, Z.
struct RewriteRule {
  std::string name;
  Term pattern;
  Term replacement;
};

// Rule set with unique names. Rules are kept sorted by name so that every
// enumeration over the library is deterministic.
class RuleLibrary {
 public:
  RuleLibrary() = default;

  // The 12-rule equational library plus the distinguished "trivial" rule.
  static RuleLibrary builtin();

  // Loads `name: pattern -> replacement` lines. Blank lines and lines starting
  // with '#' are skipped. Throws ParseError / ConfigError.
  static RuleLibrary load(const std::filesystem::path& file);

  void add(RewriteRule rule);

  const RewriteRule* find(const std::string& name) const;
  const std::vector<RewriteRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  // Serializes back to the one-rule-per-line format.
  std::string to_text() const;

 private:
  std::vector<RewriteRule> rules_;  // sorted by name
};

enum class Direction { forward, backward };

// One subterm position: a sequence of child indices (0 = left, 1 = right).
using Path = std::vector<int>;

std::string path_text(const Path& path);

enum class ApplyStatus { ok, path_error, no_match };

struct ApplyResult {
  ApplyStatus status;
  std::optional<Term> term;   // set iff status == ok
  long long match_cost = 0;   // primitive pattern-match attempts performed
};

// Rewrites the subterm at `path` with the oriented rule. The backward
// orientation matches the replacement and substitutes the pattern; it fails
// with no_match when the pattern contains metavariables the replacement does
// not bind (nothing to synthesize them from).
ApplyResult apply_rule(const Term& term, const RewriteRule& rule, const Path& path,
                       Direction direction);

}  // namespace stp::kernel
