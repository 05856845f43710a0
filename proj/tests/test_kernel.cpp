#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "kernel/oracle.hpp"
#include "kernel/proof.hpp"
#include "kernel/rule.hpp"
#include "kernel/term.hpp"
#include "kernel/verifier.hpp"
#include "support/reference.hpp"
#include "util/error.hpp"

using namespace stp;
using namespace stp::kernel;

namespace {
const RuleLibrary& lib() {
  static RuleLibrary library = RuleLibrary::builtin();
  return library;
}
}  // namespace

TEST_CASE("parse_statement canonical examples") {
  Statement s = parse_statement("(a + 0) = a");
  CHECK(s.text() == "(a + 0) = a");
  CHECK(s.lhs.is_binary());
  CHECK(s.lhs.op() == BinOp::add);
  CHECK(s.rhs.kind() == Term::Kind::variable);

  Statement deep = parse_statement("((x + y) * 2) = ((x * 2) + (y * 2))");
  CHECK(deep.lhs.depth() == 2);
  CHECK(deep.text() == "((x + y) * 2) = ((x * 2) + (y * 2))");

  // whitespace variants normalize
  CHECK(parse_statement("(a+0)=a").text() == "(a + 0) = a");
}

TEST_CASE("parse_statement malformed input") {
  try {
    parse_statement("(a + ) = a");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_statement(""), ParseError);
  CHECK_THROWS_AS(parse_statement("a = "), ParseError);
  CHECK_THROWS_AS(parse_statement("(a + b) = X"), ParseError);   // metavars rejected
  CHECK_THROWS_AS(parse_statement("(ab + 0) = a"), ParseError);  // multi-letter variable
  CHECK_THROWS_AS(parse_statement("a = b extra"), ParseError);
}

TEST_CASE("parse_statement limits") {
  TermLimits tight;
  tight.max_term_depth = 2;
  tight.max_literal = 10;
  CHECK_THROWS_AS(parse_statement("(((a + b) + c) + d) = a", tight), LimitError);
  CHECK_THROWS_AS(parse_statement("(a + 11) = a", tight), LimitError);
  CHECK(parse_statement("((a + b) + 10) = a", tight).text() == "((a + b) + 10) = a");
}

TEST_CASE("parse_proof examples") {
  Proof p = parse_proof("rw add_zero at L []; refl");
  REQUIRE(p.steps.size() == 2);
  CHECK(p.steps[0].kind == ProofStep::Kind::rewrite);
  CHECK(p.steps[0].direction == Direction::forward);
  CHECK(p.steps[0].rule_name == "add_zero");
  CHECK(p.steps[0].side == Side::left);
  CHECK(p.steps[0].path.empty());
  CHECK(p.steps[1].kind == ProofStep::Kind::refl);
  CHECK(p.text() == "rw add_zero at L []; refl");

  Proof q = parse_proof("rw <- add_assoc at R [0]; refl");
  CHECK(q.steps[0].direction == Direction::backward);
  CHECK(q.steps[0].side == Side::right);
  CHECK(q.steps[0].path == Path{0});
  CHECK(q.text() == "rw <- add_assoc at R [0]; refl");

  Proof multi = parse_proof("rw mul_comm at L [0, 1]; eval");
  CHECK(multi.steps[0].path == Path{0, 1});
  CHECK(multi.text() == "rw mul_comm at L [0, 1]; eval");
}

TEST_CASE("parse_proof structure errors") {
  CHECK_THROWS_AS(parse_proof("refl; rw add_zero at L []"), StructureError);
  CHECK_THROWS_AS(parse_proof(""), StructureError);
  CHECK_THROWS_AS(parse_proof("rw add_zero at L []"), StructureError);
  CHECK_THROWS_AS(parse_proof("refl; refl"), StructureError);
  CHECK_THROWS_AS(parse_proof("rw add_zero at L [2]; refl"), ParseError);
  CHECK_THROWS_AS(parse_proof("rw add_zero on L []; refl"), ParseError);
}

TEST_CASE("apply_rule basic orientation") {
  Term t = parse_term("(a + b)");
  const RewriteRule* comm = lib().find("add_comm");
  REQUIRE(comm != nullptr);

  ApplyResult fwd = apply_rule(t, *comm, {}, Direction::forward);
  REQUIRE(fwd.status == ApplyStatus::ok);
  CHECK(fwd.term->text() == "(b + a)");
  CHECK(t.text() == "(a + b)");  // input untouched

  const RewriteRule* az = lib().find("add_zero");
  ApplyResult nomatch = apply_rule(t, *az, {}, Direction::forward);
  CHECK(nomatch.status == ApplyStatus::no_match);

  ApplyResult bad_path = apply_rule(t, *comm, {0, 0}, Direction::forward);
  CHECK(bad_path.status == ApplyStatus::path_error);

  // backward with unbound metavariable cannot synthesize a term
  const RewriteRule* mz = lib().find("mul_zero");
  Term zero = parse_term("0");
  CHECK(apply_rule(zero, *mz, {}, Direction::backward).status == ApplyStatus::no_match);
  // but backward add_zero wraps any term
  ApplyResult wrap = apply_rule(t, *az, {}, Direction::backward);
  REQUIRE(wrap.status == ApplyStatus::ok);
  CHECK(wrap.term->text() == "((a + b) + 0)");
}

TEST_CASE("apply_rule agrees with the reference matcher on distrib_l") {
  Term t = parse_term("(c * (a * (x + y)))");
  const RewriteRule* dl = lib().find("distrib_l");
  REQUIRE(dl != nullptr);

  ApplyResult applied = apply_rule(t, *dl, {1}, Direction::forward);
  REQUIRE(applied.status == ApplyStatus::ok);
  CHECK(applied.term->text() == "(c * ((a * x) + (a * y)))");

  // independent enumeration-based matcher confirms the substitution
  Term sub = t.right();
  auto sigma = testing::reference_match(dl->pattern, sub);
  REQUIRE(sigma.has_value());
  CHECK(testing::instantiate(dl->replacement, *sigma) == applied.term->right());
}

TEST_CASE("apply_rule matches reference matcher on random instances") {
  util::Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Term t = testing::random_term(rng, 3);
    for (const RewriteRule& rule : lib().rules()) {
      ApplyResult got = apply_rule(t, rule, {}, Direction::forward);
      auto ref = testing::reference_match(rule.pattern, t);
      CHECK(ref.has_value() == (got.status == ApplyStatus::ok));
      if (ref && got.status == ApplyStatus::ok) {
        CHECK(testing::instantiate(rule.replacement, *ref) == *got.term);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);  // the sample actually exercised matches
}

TEST_CASE("verify golden examples") {
  Statement s1 = parse_statement("(a + 0) = a");
  VerificationOutcome o1 = verify(s1, parse_proof("rw add_zero at L []; refl"), lib());
  CHECK(o1.verified);
  CHECK(o1.used_lemmas == std::set<std::string>{"add_zero"});

  Statement s2 = parse_statement("(2 * 3) = 6");
  VerificationOutcome o2 = verify(s2, parse_proof("eval"), lib());
  CHECK(o2.verified);
  CHECK(o2.used_lemmas.empty());

  Statement s3 = parse_statement("(a + b) = (b + a)");
  VerificationOutcome o3 = verify(s3, parse_proof("refl"), lib());
  CHECK_FALSE(o3.verified);
  CHECK(o3.failed_step == 0);
  CHECK(o3.failure_reason == "sides differ");
}

TEST_CASE("verify two-step proof replayed against hand-computed goals") {
  // goal: (1 * (a + 0)) = a
  //   rw one_mul at L []  => (a + 0) = a
  //   rw add_zero at L [] => a = a
  //   refl closes
  Statement s = parse_statement("(1 * (a + 0)) = a");
  Term after_one_mul = parse_term("(a + 0)");
  const RewriteRule* om = lib().find("one_mul");
  ApplyResult step1 = apply_rule(s.lhs, *om, {}, Direction::forward);
  REQUIRE(step1.status == ApplyStatus::ok);
  CHECK(*step1.term == after_one_mul);

  VerificationOutcome o = verify(s, parse_proof("rw one_mul at L []; rw add_zero at L []; refl"), lib());
  CHECK(o.verified);
  CHECK(o.used_lemmas == std::set<std::string>{"one_mul", "add_zero"});
  CHECK(o.steps_executed == 3);
}

TEST_CASE("verify failure modes never throw") {
  Statement s = parse_statement("(a + 0) = a");
  Proof unknown;
  unknown.steps.push_back(ProofStep::rw(Direction::forward, "no_such_rule", Side::left, {}));
  unknown.steps.push_back(ProofStep::refl());
  VerificationOutcome o = verify(s, unknown, lib());
  CHECK_FALSE(o.verified);
  CHECK(o.failed_step == 0);

  VerificationOutcome bad_path =
      verify(s, parse_proof("rw add_zero at L [0, 0, 0]; refl"), lib());
  CHECK_FALSE(bad_path.verified);
  CHECK(bad_path.failure_reason == "path addresses no subterm");

  VerificationOutcome eval_var = verify(s, parse_proof("eval"), lib());
  CHECK_FALSE(eval_var.verified);
  CHECK(eval_var.failure_reason == "side is not a ground numeral");

  // budget exhaustion: budget 1 cannot fit the add_zero match attempt
  VerificationOutcome budget = verify(s, parse_proof("rw add_zero at L []; refl"), lib(), 1);
  CHECK_FALSE(budget.verified);
  CHECK(budget.failure_reason == "budget_exceeded");
  CHECK(budget.cost == 1);
}

TEST_CASE("verify determinism and monotone cost") {
  Statement s = parse_statement("(1 * (a + 0)) = a");
  Proof p = parse_proof("rw one_mul at L []; rw add_zero at L []; refl");
  VerificationOutcome a = verify(s, p, lib());
  VerificationOutcome b = verify(s, p, lib());
  CHECK(a.verified == b.verified);
  CHECK(a.cost == b.cost);
  CHECK(a.steps_executed == b.steps_executed);

  // prefixes of the proof execute monotonically increasing cost
  long long prev_cost = 0;
  for (std::size_t n = 1; n <= p.steps.size(); ++n) {
    Proof prefix;
    prefix.steps.assign(p.steps.begin(), p.steps.begin() + n);
    if (prefix.steps.back().kind == ProofStep::Kind::rewrite)
      prefix.steps.push_back(ProofStep::refl());
    VerificationOutcome o = verify(s, prefix, lib());
    CHECK(o.cost >= prev_cost);
    prev_cost = o.cost;
  }
}

TEST_CASE("brute_force_prove examples") {
  auto p1 = brute_force_prove(parse_statement("(0 + a) = a"), 1, lib());
  REQUIRE(p1.has_value());
  CHECK(p1->text() == "rw zero_add at L []; refl");

  auto p2 = brute_force_prove(parse_statement("(a + b) = (a * b)"), 3, lib());
  CHECK_FALSE(p2.has_value());

  auto p3 = brute_force_prove(parse_statement("a = a"), 0, lib());
  REQUIRE(p3.has_value());
  CHECK(p3->text() == "refl");

  auto p4 = brute_force_prove(parse_statement("(2 * 3) = 6"), 0, lib());
  REQUIRE(p4.has_value());
  CHECK(p4->text() == "eval");

  CHECK_THROWS_AS(brute_force_prove(parse_statement("a = a"), 7, lib()), ConfigError);
}

TEST_CASE("oracle proofs verify with exactly the rewrite lemmas") {
  util::Rng rng(7);
  int proved = 0;
  for (int i = 0; i < 60; ++i) {
    Statement s = testing::random_statement(rng, 2);
    auto proof = brute_force_prove(s, 3, lib());
    if (!proof) continue;
    ++proved;
    VerificationOutcome o = verify(s, *proof, lib());
    CHECK(o.verified);
    std::set<std::string> expected;
    for (const ProofStep& st : proof->steps)
      if (st.kind == ProofStep::Kind::rewrite) expected.insert(st.rule_name);
    CHECK(o.used_lemmas == expected);
  }
  CHECK(proved > 3);
}

TEST_CASE("single mutations of verified proofs almost always fail") {
  // small-scale version of the golden mutation gate
  util::Rng rng(99);
  int mutations = 0;
  int failed = 0;
  std::vector<std::string> names;
  for (const RewriteRule& r : lib().rules()) names.push_back(r.name);

  for (int i = 0; i < 25; ++i) {
    auto [s, walk_proof] = testing::random_walk_statement(rng, lib(), 1 + static_cast<int>(rng.index(2)));
    auto proof = std::optional<Proof>(walk_proof);
    REQUIRE(verify(s, *proof, lib()).verified);
    for (std::size_t si = 0; si < proof->steps.size(); ++si) {
      if (proof->steps[si].kind != ProofStep::Kind::rewrite) continue;
      // flip direction
      {
        Proof m = *proof;
        m.steps[si].direction = m.steps[si].direction == Direction::forward
                                    ? Direction::backward
                                    : Direction::forward;
        ++mutations;
        if (!verify(s, m, lib()).verified) ++failed;
      }
      // flip side
      {
        Proof m = *proof;
        m.steps[si].side = m.steps[si].side == Side::left ? Side::right : Side::left;
        ++mutations;
        if (!verify(s, m, lib()).verified) ++failed;
      }
      // flip each path index
      for (std::size_t pi = 0; pi < proof->steps[si].path.size(); ++pi) {
        Proof m = *proof;
        m.steps[si].path[pi] ^= 1;
        ++mutations;
        if (!verify(s, m, lib()).verified) ++failed;
      }
      // swap rule name
      for (const std::string& name : names) {
        if (name == proof->steps[si].rule_name) continue;
        Proof m = *proof;
        m.steps[si].rule_name = name;
        ++mutations;
        if (!verify(s, m, lib()).verified) ++failed;
      }
    }
  }
  REQUIRE(mutations > 50);
  // The >=95% gate runs over the curated golden suite in the acceptance
  // binary; random walks include commutativity steps whose direction flip is
  // a no-op, so the bar here is lower.
  CHECK(static_cast<double>(failed) >= 0.85 * static_cast<double>(mutations));
}

TEST_CASE("statement and proof round-trip through the parsers") {
  util::Rng rng(4242);
  for (int i = 0; i < 500; ++i) {
    Statement s = testing::random_statement(rng, 3);
    CHECK(parse_statement(s.text()) == s);
  }
  // proofs from the oracle round-trip too
  int seen = 0;
  for (int i = 0; i < 40 && seen < 10; ++i) {
    Statement s = testing::random_statement(rng, 2);
    auto proof = brute_force_prove(s, 2, lib());
    if (!proof) continue;
    ++seen;
    CHECK(parse_proof(proof->text()) == *proof);
  }
}

TEST_CASE("shipped rule file matches the built-in library") {
  auto path = std::filesystem::path(__FILE__).parent_path().parent_path() / "data" / "rules.txt";
  RuleLibrary loaded = RuleLibrary::load(path);
  CHECK(loaded.to_text() == lib().to_text());
}

TEST_CASE("rule library loading") {
  RuleLibrary builtin = lib();
  CHECK(builtin.size() == 13);
  CHECK(builtin.find("trivial") != nullptr);
  CHECK(builtin.find("trivial")->pattern.kind() == Term::Kind::metavar);

  // round-trip through the text format
  auto tmp = std::filesystem::temp_directory_path() / "stp_rules_test.txt";
  {
    std::ofstream out(tmp);
    out << builtin.to_text();
  }
  RuleLibrary loaded = RuleLibrary::load(tmp);
  CHECK(loaded.to_text() == builtin.to_text());
  std::filesystem::remove(tmp);
}
