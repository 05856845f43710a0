#include "kernel/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>
#include <vector>

#include "util/error.hpp"

namespace stp::kernel {

namespace {

void collect_paths(const Term& t, Path& current, std::vector<Path>& out) {
  out.push_back(current);
  if (!t.is_binary()) return;
  current.push_back(0);
  collect_paths(t.left(), current, out);
  current.back() = 1;
  collect_paths(t.right(), current, out);
  current.pop_back();
}

// Pre-order enumeration yields paths in lexicographic order already.
std::vector<Path> all_paths(const Term& t) {
  std::vector<Path> out;
  Path current;
  collect_paths(t, current, out);
  return out;
}

std::optional<ProofStep> closing_step(const Term& lhs, const Term& rhs) {
  if (lhs == rhs) return ProofStep::refl();
  auto lv = evaluate_ground(lhs);
  auto rv = evaluate_ground(rhs);
  if (lv && rv && *lv == *rv) return ProofStep::eval();
  return std::nullopt;
}

struct SearchNode {
  Term lhs;
  Term rhs;
  int parent;      // index into the node arena, -1 for the root
  ProofStep move;  // rewrite that produced this node
};

}  // namespace

std::optional<Proof> brute_force_prove(const Statement& statement, int max_depth,
                                       const RuleLibrary& library, const TermLimits& limits) {
  if (max_depth > 6) throw ConfigError("brute_force_prove: max_depth must be at most 6");
  if (max_depth < 0) throw ConfigError("brute_force_prove: max_depth must be non-negative");

  // Node 0 is the root; every other node records the rewrite that produced it.
  auto build_proof = [](const std::vector<SearchNode>& arena, int index, ProofStep close) {
    std::vector<ProofStep> steps;
    for (int at = index; at != 0; at = arena[at].parent) steps.push_back(arena[at].move);
    std::reverse(steps.begin(), steps.end());
    steps.push_back(close);
    return Proof{std::move(steps)};
  };

  std::vector<SearchNode> arena;
  arena.push_back(SearchNode{statement.lhs, statement.rhs, -1, ProofStep::refl()});

  if (auto close = closing_step(statement.lhs, statement.rhs))
    return Proof{{*close}};

  std::unordered_set<std::string> visited;
  visited.insert(statement.lhs.text() + " = " + statement.rhs.text());

  std::deque<std::pair<int, int>> frontier;  // (arena index, depth)
  frontier.emplace_back(0, 0);

  while (!frontier.empty()) {
    auto [index, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= max_depth) continue;

    Term lhs = arena[index].lhs;
    Term rhs = arena[index].rhs;

    for (const RewriteRule& rule : library.rules()) {
      for (Side side : {Side::left, Side::right}) {
        const Term& target = side == Side::left ? lhs : rhs;
        for (const Path& path : all_paths(target)) {
          for (Direction dir : {Direction::forward, Direction::backward}) {
            ApplyResult applied = apply_rule(target, rule, path, dir);
            if (applied.status != ApplyStatus::ok) continue;
            if (applied.term->depth() > limits.max_term_depth) continue;
            Term new_lhs = side == Side::left ? *applied.term : lhs;
            Term new_rhs = side == Side::left ? rhs : *applied.term;
            std::string key = new_lhs.text() + " = " + new_rhs.text();
            if (!visited.insert(std::move(key)).second) continue;
            ProofStep move = ProofStep::rw(dir, rule.name, side, path);
            arena.push_back(SearchNode{new_lhs, new_rhs, index, move});
            int new_index = static_cast<int>(arena.size()) - 1;
            if (auto close = closing_step(new_lhs, new_rhs))
              return build_proof(arena, new_index, *close);
            frontier.emplace_back(new_index, depth + 1);
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace stp::kernel
