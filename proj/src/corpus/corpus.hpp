#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kernel/proof.hpp"
#include "kernel/rule.hpp"
#include "kernel/term.hpp"

namespace stp::corpus {

struct TheoremEntry {
  std::string name;
  kernel::Statement statement;
  std::optional<kernel::Proof> proof;
  std::string file_id;
  int position = 0;  // order within file
};

struct Corpus {
  std::vector<TheoremEntry> entries;  // grouped by file, file order preserved

  std::vector<std::string> file_ids() const;
};

struct GeneratorOptions {
  int files = 1;
  int theorems_per_file = 10;
  int min_steps = 1;
  int max_steps = 3;
  int variables = 6;      // pool a..a+n-1
  int max_literal = 3;    // literal pool 0..max_literal
  double leaf_var_prob = 0.7;
  // Probability that a walk step follows the fixed rule-succession table at
  // the root instead of a uniform random applicable rewrite. Nonzero values
  // give proofs technique structure (recurring rule chains) the way a
  // human-written library does.
  double motif_strength = 0.5;
  // Probability that a theorem records its proof as backward rewrites of the
  // right side (the same walk replayed in reverse) instead of forward
  // rewrites of the left side. Mixes both proof styles into the corpus.
  double backward_proof_prob = 0.5;
};

// Procedural proof library: every theorem is a forward rewrite walk
// "start = end" with the recorded proof (rewrites on L, closed by refl).
// Statements are unique corpus-wide and every proof verifies. Deterministic
// in the seed. Throws ConfigError for invalid step ranges.
Corpus generate_seed_corpus(std::uint64_t seed, const GeneratorOptions& options,
                            const kernel::RuleLibrary& library);

// One directory per corpus, one text file per corpus file, lines
// `theorem <name> : <statement> := <proof>` (`:= <proof>` absent for
// proofless entries). LF endings.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir, const kernel::TermLimits& limits = {});

struct ProverSftExample {
  kernel::Statement statement;
  kernel::Proof proof;
};

struct ConjecturerSftExample {
  std::string lemma;
  TheoremEntry theorem_x;
  TheoremEntry theorem_y;
};

// All statement-proof pairs, in (file, position) order.
std::vector<ProverSftExample> extract_prover_sft(const Corpus& corpus);

// All (lemma, X, Y) tuples with X before Y in the same file and the lemma used
// in both proofs; per-(file, lemma) groups larger than the cap are reduced to
// a seeded uniform subset.
std::vector<ConjecturerSftExample> extract_conjecturer_sft(const Corpus& corpus, int per_pair_cap,
                                                           std::uint64_t seed,
                                                           const kernel::RuleLibrary& library);

struct TaggedStatement {
  kernel::Statement statement;
  std::string source;  // matching-weight tag ("main", "valid", ...)
};

// One statement per line; de-duplicated by canonical text, first occurrence
// order preserved. Parse failures carry the line number.
std::vector<TaggedStatement> load_unproved_dataset(const std::filesystem::path& file,
                                                   const std::string& source_tag = "main",
                                                   const kernel::TermLimits& limits = {});

void save_statements(const std::vector<kernel::Statement>& statements,
                     const std::filesystem::path& file);

}  // namespace stp::corpus
