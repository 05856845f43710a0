#pragma once

// Shared test fixtures: miniature corpora, SFT directories and run configs.

#include <filesystem>
#include <string>

#include "corpus/corpus.hpp"
#include "policy/prompt.hpp"
#include "selfplay/config.hpp"
#include "selfplay/loop.hpp"
#include "util/jsonio.hpp"

namespace stp::testing {

struct Fixture {
  std::filesystem::path root;
  std::filesystem::path sft_dir;
  std::filesystem::path dataset_file;
  selfplay::RunConfig config;
};

// Builds a small end-to-end fixture: a seed corpus for SFT, a disjoint
// proofless dataset, and a config pointing at both.
inline Fixture make_fixture(const std::string& name, int sft_theorems, int dataset_statements,
                            int min_steps, int max_steps, std::uint64_t seed) {
  Fixture f;
  f.root = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(f.root);
  std::filesystem::create_directories(f.root);

  auto library = kernel::RuleLibrary::builtin();

  corpus::GeneratorOptions sft_opt;
  sft_opt.files = 2;
  sft_opt.theorems_per_file = (sft_theorems + 1) / 2;
  sft_opt.min_steps = min_steps;
  sft_opt.max_steps = max_steps;
  corpus::Corpus sft_corpus = corpus::generate_seed_corpus(seed + 1000, sft_opt, library);

  f.sft_dir = f.root / "sft";
  std::filesystem::create_directories(f.sft_dir);
  std::vector<util::Json> conj_rows;
  for (const auto& ex : corpus::extract_conjecturer_sft(sft_corpus, 8, seed, library)) {
    policy::WeightedExample w{
        policy::PromptRecord::conjecturer(ex.lemma, ex.theorem_x.statement, *ex.theorem_x.proof),
        ex.theorem_y.statement.text() + " </hard theorem>", 1.0};
    conj_rows.push_back(w.to_json());
  }
  std::vector<util::Json> prover_rows;
  for (const auto& ex : corpus::extract_prover_sft(sft_corpus)) {
    policy::WeightedExample w{policy::PromptRecord::prover(ex.statement), ex.proof.text(), 1.0};
    prover_rows.push_back(w.to_json());
  }
  util::write_jsonl(f.sft_dir / "conjecturer_sft.jsonl", conj_rows);
  util::write_jsonl(f.sft_dir / "prover_sft.jsonl", prover_rows);

  corpus::GeneratorOptions data_opt;
  data_opt.files = 1;
  data_opt.theorems_per_file = dataset_statements;
  data_opt.min_steps = min_steps;
  data_opt.max_steps = max_steps;
  corpus::Corpus data_corpus = corpus::generate_seed_corpus(seed + 2000, data_opt, library);
  std::vector<kernel::Statement> statements;
  for (const auto& e : data_corpus.entries) statements.push_back(e.statement);
  f.dataset_file = f.root / "dataset.txt";
  corpus::save_statements(statements, f.dataset_file);

  f.config.seed = seed;
  f.config.dataset_path = f.dataset_file.string();
  f.config.sft_dir = f.sft_dir.string();
  f.config.K = 8;
  f.config.K_baseline = 16;
  f.config.max_tokens = 64;
  f.config.workers = 2;
  return f;
}

}  // namespace stp::testing
