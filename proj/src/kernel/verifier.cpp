#include "kernel/verifier.hpp"

namespace stp::kernel {

std::optional<std::uint64_t> evaluate_ground(const Term& term) {
  switch (term.kind()) {
    case Term::Kind::literal:
      return term.literal_value();
    case Term::Kind::variable:
    case Term::Kind::metavar:
      return std::nullopt;
    case Term::Kind::binary: {
      auto l = evaluate_ground(term.left());
      if (!l) return std::nullopt;
      auto r = evaluate_ground(term.right());
      if (!r) return std::nullopt;
      std::uint64_t out = 0;
      if (term.op() == BinOp::add) {
        if (__builtin_add_overflow(*l, *r, &out)) return std::nullopt;
      } else {
        if (__builtin_mul_overflow(*l, *r, &out)) return std::nullopt;
      }
      return out;
    }
  }
  return std::nullopt;
}

VerificationOutcome verify(const Statement& statement, const Proof& proof,
                           const RuleLibrary& library, long long step_budget) {
  VerificationOutcome out;

  auto fail = [&](int step, std::string reason) {
    out.verified = false;
    out.failed_step = step;
    out.failure_reason = std::move(reason);
    return out;
  };

  if (proof.steps.empty()) return fail(-1, "empty proof");

  Term lhs = statement.lhs;
  Term rhs = statement.rhs;
  const int last = static_cast<int>(proof.steps.size()) - 1;

  for (int i = 0; i <= last; ++i) {
    const ProofStep& step = proof.steps[i];

    if (step.kind == ProofStep::Kind::rewrite) {
      const RewriteRule* rule = library.find(step.rule_name);
      if (rule == nullptr) return fail(i, "unknown rule " + step.rule_name);

      const Term& side = step.side == Side::left ? lhs : rhs;
      ApplyResult applied = apply_rule(side, *rule, step.path, step.direction);
      if (out.cost + applied.match_cost > step_budget) {
        out.cost = step_budget;
        return fail(i, "budget_exceeded");
      }
      out.cost += applied.match_cost;
      if (applied.status == ApplyStatus::path_error) return fail(i, "path addresses no subterm");
      if (applied.status == ApplyStatus::no_match) return fail(i, "pattern does not match");
      if (step.side == Side::left)
        lhs = *applied.term;
      else
        rhs = *applied.term;
      out.used_lemmas.insert(step.rule_name);
      ++out.steps_executed;
      if (i == last) return fail(i, "proof does not close");
      continue;
    }

    // refl / eval: one match attempt each on the cost meter.
    if (out.cost + 1 > step_budget) {
      out.cost = step_budget;
      return fail(i, "budget_exceeded");
    }
    ++out.cost;
    if (i != last) return fail(i, "closing step before the final step");

    if (step.kind == ProofStep::Kind::refl) {
      ++out.steps_executed;
      if (lhs == rhs) {
        out.verified = true;
        return out;
      }
      return fail(i, "sides differ");
    }

    ++out.steps_executed;
    auto lv = evaluate_ground(lhs);
    auto rv = evaluate_ground(rhs);
    if (!lv || !rv) return fail(i, "side is not a ground numeral");
    if (*lv != *rv) return fail(i, "values differ");
    out.verified = true;
    return out;
  }
  return fail(last, "proof does not close");
}

}  // namespace stp::kernel
