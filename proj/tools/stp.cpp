// Command-line surface: corpus generation, SFT extraction, the self-play
// loop, baselines, one-off verification, the proof-search oracle, final
// re-training and report export.

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>

#include "corpus/corpus.hpp"
#include "kernel/oracle.hpp"
#include "kernel/verifier.hpp"
#include "policy/ngram.hpp"
#include "reporting/report.hpp"
#include "selfplay/loop.hpp"
#include "util/error.hpp"

namespace {

using namespace stp;

selfplay::RunConfig make_config(const std::string& config_path, bool seed_set,
                                std::uint64_t seed_flag) {
  selfplay::RunConfig config;
  if (!config_path.empty()) config = selfplay::RunConfig::load(config_path);
  if (seed_set) config.seed = seed_flag;
  if (const char* env = std::getenv("STP_SEED")) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("STP_SEED must be an unsigned integer");
    }
  }
  return config;
}

kernel::RuleLibrary load_rules(const std::string& rules_path) {
  return rules_path.empty() ? kernel::RuleLibrary::builtin()
                            : kernel::RuleLibrary::load(rules_path);
}

int cmd_gen_corpus(const std::string& out_dir, std::uint64_t seed, int files, int theorems,
                   int min_steps, int max_steps, int variables,
                   const std::string& proofless_out, const std::string& rules_path) {
  corpus::GeneratorOptions opt;
  opt.files = files;
  opt.theorems_per_file = theorems;
  opt.min_steps = min_steps;
  opt.max_steps = max_steps;
  opt.variables = variables;
  auto library = load_rules(rules_path);
  corpus::Corpus c = corpus::generate_seed_corpus(seed, opt, library);
  corpus::save_corpus(c, out_dir);
  if (!proofless_out.empty()) {
    std::vector<kernel::Statement> statements;
    for (const auto& e : c.entries) statements.push_back(e.statement);
    corpus::save_statements(statements, proofless_out);
  }
  std::cout << "wrote " << c.entries.size() << " theorems to " << out_dir << "\n";
  return 0;
}

int cmd_sft(const std::string& corpus_dir, const std::string& out_dir, int per_pair_cap,
            const selfplay::RunConfig& config) {
  auto library = load_rules(config.rules_path);
  corpus::Corpus c = corpus::load_corpus(corpus_dir, config.term_limits());

  std::vector<util::Json> conj_rows;
  auto conj = corpus::extract_conjecturer_sft(c, per_pair_cap, config.seed, library);
  for (const auto& ex : conj) {
    policy::WeightedExample w{
        policy::PromptRecord::conjecturer(ex.lemma, ex.theorem_x.statement, *ex.theorem_x.proof),
        ex.theorem_y.statement.text() + " </hard theorem>", 1.0};
    conj_rows.push_back(w.to_json());
  }

  std::vector<util::Json> prover_rows;
  auto prover = corpus::extract_prover_sft(c);
  for (const auto& ex : prover) {
    policy::WeightedExample w{policy::PromptRecord::prover(ex.statement), ex.proof.text(), 1.0};
    prover_rows.push_back(w.to_json());
  }

  std::filesystem::create_directories(out_dir);
  util::write_jsonl(std::filesystem::path(out_dir) / "conjecturer_sft.jsonl", conj_rows);
  util::write_jsonl(std::filesystem::path(out_dir) / "prover_sft.jsonl", prover_rows);

  selfplay::PolicySet base(config.ngram_order, config.alpha, config.split_roles);
  base.train(selfplay::load_sft_examples(out_dir));
  base.save(out_dir, "base");

  std::cout << "conjecturer SFT: " << conj_rows.size() << " examples, prover SFT: "
            << prover_rows.size() << " examples -> " << out_dir << "\n";
  return 0;
}

int cmd_run(const std::string& run_dir, selfplay::RunConfig config, selfplay::RunMode mode,
            int iters, bool resume, bool had_config_flag) {
  if (resume && had_config_flag)
    std::cerr << "note: --resume uses the config stored in the run directory\n";
  selfplay::Runner runner(run_dir, config, mode, resume);
  runner.run_to(iters);
  std::cout << "proved " << runner.state().proved.size() << "/" << runner.dataset().size()
            << " statements after " << runner.state().iteration << " iterations\n";
  return 0;
}

int cmd_verify(const std::string& statement_text, const std::string& proof_text,
               const std::string& rules_path, long long budget) {
  auto library = load_rules(rules_path);
  kernel::Statement statement;
  try {
    statement = kernel::parse_statement(statement_text);
  } catch (const Error& e) {
    std::cerr << "statement: " << e.what() << "\n";
    return 1;
  }
  kernel::Proof proof;
  try {
    proof = kernel::parse_proof(proof_text);
  } catch (const Error& e) {
    std::cerr << "proof: " << e.what() << "\n";
    return 2;
  }
  auto outcome = kernel::verify(statement, proof, library, budget);
  std::cout << outcome.verdict_text() << "\n";
  if (!outcome.verified) return 2;
  std::cout << "used lemmas:";
  for (const auto& l : outcome.used_lemmas) std::cout << " " << l;
  std::cout << "\ncost: " << outcome.cost << "\n";
  return 0;
}

int cmd_oracle(const std::string& statement_text, int depth, const std::string& rules_path) {
  auto library = load_rules(rules_path);
  kernel::Statement statement = kernel::parse_statement(statement_text);
  auto proof = kernel::brute_force_prove(statement, depth, library);
  if (!proof) {
    std::cout << "no proof within depth " << depth << "\n";
    return 2;
  }
  std::cout << proof->text() << "\n";
  return 0;
}

int cmd_retrain_final(const std::string& run_dir, const std::string& out_dir) {
  selfplay::Runner runner(run_dir, selfplay::RunConfig{}, selfplay::RunMode::stp, true);
  selfplay::PolicySet model = runner.final_retrain_model();
  std::filesystem::path out = out_dir.empty() ? std::filesystem::path(run_dir) / "model"
                                              : std::filesystem::path(out_dir);
  std::filesystem::create_directories(out);
  model.save(out, "final");
  std::cout << "wrote final model to " << out.string() << "\n";
  return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format, std::string out_file) {
  if (out_file.empty())
    out_file = (std::filesystem::path(run_dir) / ("report." + format)).string();
  report::emit_report(run_dir, format, out_file);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-play theorem-proving loop over a toy equational system"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "run config JSON file")->expected(1);
  auto* seed_opt = app.add_option("--seed", seed_flag, "root seed (overrides config file)");

  std::function<int()> action;

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "generate a seeded proof corpus");
  struct {
    std::string out, proofless_out, rules;
    std::uint64_t seed = 0;
    int files = 4, theorems = 50, min_steps = 1, max_steps = 5, variables = 6;
  } gen_args;
  gen->add_option("--out", gen_args.out, "corpus output directory")->required();
  gen->add_option("--gen-seed", gen_args.seed, "generator seed");
  gen->add_option("--files", gen_args.files, "number of corpus files");
  gen->add_option("--theorems", gen_args.theorems, "theorems per file");
  gen->add_option("--min-steps", gen_args.min_steps, "minimum rewrite steps");
  gen->add_option("--max-steps", gen_args.max_steps, "maximum rewrite steps");
  gen->add_option("--variables", gen_args.variables, "variable pool size");
  gen->add_option("--proofless-out", gen_args.proofless_out,
                  "also write a statements-only dataset file");
  gen->add_option("--rules", gen_args.rules, "rule library file (default: built-in)");
  gen->callback([&] {
    action = [&] {
      return cmd_gen_corpus(gen_args.out, gen_args.seed, gen_args.files, gen_args.theorems,
                            gen_args.min_steps, gen_args.max_steps, gen_args.variables,
                            gen_args.proofless_out, gen_args.rules);
    };
  });

  // sft
  auto* sft = app.add_subcommand("sft", "extract SFT datasets and build the base model");
  struct {
    std::string corpus, out;
    int per_pair_cap = 8;
  } sft_args;
  sft->add_option("--corpus", sft_args.corpus, "corpus directory")->required();
  sft->add_option("--out", sft_args.out, "output directory")->required();
  sft->add_option("--per-pair-cap", sft_args.per_pair_cap, "max tuples per (file, lemma)");
  sft->callback([&] {
    action = [&] {
      return cmd_sft(sft_args.corpus, sft_args.out, sft_args.per_pair_cap,
                     make_config(config_path, seed_set, seed_flag));
    };
  });

  // run
  auto* run = app.add_subcommand("run", "run the self-play loop");
  struct {
    std::string run_dir;
    int iters = 1;
    bool resume = false;
  } run_args;
  run->add_option("--run-dir", run_args.run_dir, "run directory")->required();
  run->add_option("--iters", run_args.iters, "target iteration count");
  run->add_flag("--resume", run_args.resume, "continue an existing run");
  run->callback([&] {
    action = [&] {
      return cmd_run(run_args.run_dir, make_config(config_path, seed_set, seed_flag),
                     selfplay::RunMode::stp, run_args.iters, run_args.resume,
                     !config_path.empty());
    };
  });

  // baseline
  auto* baseline = app.add_subcommand("baseline", "run a baseline method");
  struct {
    std::string run_dir, method = "expert-opt";
    int iters = 1;
    bool resume = false;
  } base_args;
  baseline->add_option("--run-dir", base_args.run_dir, "run directory")->required();
  baseline->add_option("--method", base_args.method,
                       "expert-vanilla | expert-opt | parallel")->required();
  baseline->add_option("--iters", base_args.iters, "target iteration count");
  baseline->add_flag("--resume", base_args.resume, "continue an existing run");
  baseline->callback([&] {
    action = [&] {
      return cmd_run(base_args.run_dir, make_config(config_path, seed_set, seed_flag),
                     selfplay::run_mode_from(base_args.method), base_args.iters,
                     base_args.resume, !config_path.empty());
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "verify one statement/proof pair");
  struct {
    std::string statement, proof, rules;
    long long budget = kernel::kDefaultStepBudget;
  } verify_args;
  verify->add_option("--statement", verify_args.statement, "statement text")->required();
  verify->add_option("--proof", verify_args.proof, "proof text")->required();
  verify->add_option("--rules", verify_args.rules, "rule library file");
  verify->add_option("--budget", verify_args.budget, "match-attempt budget");
  verify->callback([&] {
    action = [&] {
      return cmd_verify(verify_args.statement, verify_args.proof, verify_args.rules,
                        verify_args.budget);
    };
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force proof search");
  struct {
    std::string statement, rules;
    int depth = 3;
  } oracle_args;
  oracle->add_option("--statement", oracle_args.statement, "statement text")->required();
  oracle->add_option("--depth", oracle_args.depth, "maximum rewrite depth (<= 6)");
  oracle->add_option("--rules", oracle_args.rules, "rule library file");
  oracle->callback([&] {
    action = [&] { return cmd_oracle(oracle_args.statement, oracle_args.depth, oracle_args.rules); };
  });

  // retrain-final
  auto* retrain = app.add_subcommand("retrain-final", "re-train from base on the run history");
  struct {
    std::string run_dir, out;
  } retrain_args;
  retrain->add_option("--run-dir", retrain_args.run_dir, "run directory")->required();
  retrain->add_option("--out", retrain_args.out, "output directory (default: run model dir)");
  retrain->callback([&] {
    action = [&] { return cmd_retrain_final(retrain_args.run_dir, retrain_args.out); };
  });

  // report
  auto* rep = app.add_subcommand("report", "export run reports");
  struct {
    std::string run_dir, format = "csv", out;
  } report_args;
  rep->add_option("--run-dir", report_args.run_dir, "run directory")->required();
  rep->add_option("--format", report_args.format, "csv | jsonl");
  rep->add_option("--out", report_args.out, "output file");
  rep->callback([&] {
    action = [&] { return cmd_report(report_args.run_dir, report_args.format, report_args.out); };
  });

  // global --config / --seed may appear after the subcommand name
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
    seed_set = seed_opt->count() > 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action ? action() : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const MissingRunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
