#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kernel/proof.hpp"
#include "kernel/term.hpp"
#include "util/jsonio.hpp"

namespace stp::policy {

enum class Role { conjecturer, prover };

inline const char* role_name(Role r) { return r == Role::conjecturer ? "conjecturer" : "prover"; }

// A rendered model input. Conjecturer prompts pair a lemma with a seed
// statement and its proof; prover prompts carry the target statement.
//
//   conjecturer: <lemma> add_comm <easy theorem> <stmt> := <proof> <hard theorem>
//   prover:      <theorem> <stmt> <proof>
//
// Conjecturer completions end with the </hard theorem> token.
struct PromptRecord {
  Role role = Role::prover;
  std::optional<std::string> lemma;
  std::optional<kernel::Statement> seed_statement;
  std::optional<kernel::Proof> seed_proof;
  std::optional<kernel::Statement> target_statement;

  static PromptRecord conjecturer(std::string lemma, kernel::Statement seed,
                                  kernel::Proof seed_proof);
  static PromptRecord prover(kernel::Statement target);

  std::vector<std::string> tokens() const;
  std::string text() const;

  util::Json to_json() const;
  static PromptRecord from_json(const util::Json& j);
};

// A (prompt, completion, weight) training record.
struct WeightedExample {
  PromptRecord prompt;
  std::string completion;
  double weight = 1.0;

  util::Json to_json() const;
  static WeightedExample from_json(const util::Json& j);
};

}  // namespace stp::policy
