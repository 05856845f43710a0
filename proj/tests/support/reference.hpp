#pragma once

// Test-only reference implementations, kept independent of the library's
// matching and sampling paths so they can serve as oracles.

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "kernel/proof.hpp"
#include "kernel/rule.hpp"
#include "kernel/term.hpp"
#include "util/rng.hpp"

namespace stp::testing {

using kernel::BinOp;
using kernel::Term;

inline void collect_subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  if (t.is_binary()) {
    collect_subterms(t.left(), out);
    collect_subterms(t.right(), out);
  }
}

inline void collect_subterm_paths(const Term& t, kernel::Path& current,
                                  std::vector<kernel::Path>& out) {
  out.push_back(current);
  if (!t.is_binary()) return;
  current.push_back(0);
  collect_subterm_paths(t.left(), current, out);
  current.back() = 1;
  collect_subterm_paths(t.right(), current, out);
  current.pop_back();
}

inline void collect_metavars(const Term& t, std::vector<char>& out) {
  if (t.kind() == Term::Kind::metavar) {
    if (std::find(out.begin(), out.end(), t.meta_name()) == out.end()) out.push_back(t.meta_name());
  } else if (t.is_binary()) {
    collect_metavars(t.left(), out);
    collect_metavars(t.right(), out);
  }
}

inline Term instantiate(const Term& pattern, const std::map<char, Term>& sigma) {
  switch (pattern.kind()) {
    case Term::Kind::metavar:
      return sigma.at(pattern.meta_name());
    case Term::Kind::variable:
    case Term::Kind::literal:
      return pattern;
    case Term::Kind::binary:
      return Term::binary(pattern.op(), instantiate(pattern.left(), sigma),
                          instantiate(pattern.right(), sigma));
  }
  return pattern;
}

// Reference matcher: enumerates every assignment of the pattern's
// metavariables to subterms of the target and tests the instantiation for
// equality. Exponential, test-only.
inline std::optional<std::map<char, Term>> reference_match(const Term& pattern,
                                                           const Term& target) {
  std::vector<char> metas;
  collect_metavars(pattern, metas);
  std::vector<Term> candidates;
  collect_subterms(target, candidates);

  std::vector<std::size_t> pick(metas.size(), 0);
  while (true) {
    std::map<char, Term> sigma;
    for (std::size_t i = 0; i < metas.size(); ++i) sigma.emplace(metas[i], candidates[pick[i]]);
    if (instantiate(pattern, sigma) == target) return sigma;
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < candidates.size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
    if (metas.empty()) break;
  }
  if (metas.empty()) {
    std::map<char, Term> sigma;
    if (instantiate(pattern, sigma) == target) return sigma;
  }
  return std::nullopt;
}

// Random term over a small alphabet; leaf probability rises with depth.
inline Term random_term(util::Rng& rng, int max_depth) {
  if (max_depth == 0 || rng.uniform_real() < 0.45) {
    if (rng.uniform_real() < 0.7) return Term::variable(static_cast<char>('a' + rng.index(6)));
    return Term::literal(rng.uniform_u64(4));
  }
  BinOp op = rng.bernoulli(0.5) ? BinOp::add : BinOp::mul;
  return Term::binary(op, random_term(rng, max_depth - 1), random_term(rng, max_depth - 1));
}

inline kernel::Statement random_statement(util::Rng& rng, int max_depth = 3) {
  return kernel::Statement{random_term(rng, max_depth), random_term(rng, max_depth)};
}

// Provable statement built by a forward rewrite walk: returns the statement
// "start = end" together with the recorded proof.
inline std::pair<kernel::Statement, kernel::Proof> random_walk_statement(
    util::Rng& rng, const kernel::RuleLibrary& lib, int steps) {
  using kernel::ApplyResult;
  using kernel::ApplyStatus;
  using kernel::Direction;
  using kernel::Path;
  using kernel::ProofStep;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Term start = Term::binary(rng.bernoulli(0.5) ? BinOp::add : BinOp::mul,
                              random_term(rng, 1), random_term(rng, 1));
    Term current = start;
    std::vector<ProofStep> recorded;
    for (int s = 0; s < steps; ++s) {
      std::vector<std::pair<const kernel::RewriteRule*, Path>> moves;
      std::vector<Path> paths;
      Path tmp;
      collect_subterm_paths(current, tmp, paths);
      for (const auto& rule : lib.rules()) {
        if (rule.name == "trivial") continue;
        for (const Path& p : paths) {
          ApplyResult r = apply_rule(current, rule, p, Direction::forward);
          if (r.status == ApplyStatus::ok && *r.term != current) moves.emplace_back(&rule, p);
        }
      }
      if (moves.empty()) break;
      auto& [rule, path] = moves[rng.index(moves.size())];
      current = *apply_rule(current, *rule, path, Direction::forward).term;
      recorded.push_back(ProofStep::rw(Direction::forward, rule->name, kernel::Side::left, path));
    }
    if (recorded.size() != static_cast<std::size_t>(steps) || current == start) continue;
    recorded.push_back(ProofStep::refl());
    return {kernel::Statement{start, current}, kernel::Proof{std::move(recorded)}};
  }
  // fall back to a single guaranteed rewrite
  Term t = Term::binary(BinOp::add, Term::variable('a'), Term::literal(0));
  kernel::Proof proof{{ProofStep::rw(Direction::forward, "add_zero", kernel::Side::left, {}),
                       ProofStep::refl()}};
  return {kernel::Statement{t, Term::variable('a')}, proof};
}

}  // namespace stp::testing
