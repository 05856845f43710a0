#include "selfplay/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include "policy/tokenizer.hpp"
#include "reporting/report.hpp"
#include "util/pool.hpp"
#include "util/rng.hpp"

namespace stp::selfplay {

using policy::PromptRecord;
using policy::WeightedExample;

namespace {

// seed-stream phase tags
constexpr std::uint64_t kPhaseConjecturerInputs = 1;
constexpr std::uint64_t kPhaseConjectureSampling = 2;
constexpr std::uint64_t kPhaseConjectureCap = 3;
constexpr std::uint64_t kPhaseProofSampling = 4;
constexpr std::uint64_t kPhaseRefreshChoice = 5;
constexpr std::uint64_t kPhaseExpertCap = 6;

std::vector<corpus::TaggedStatement> unproved_statements(
    const RunState& state, const std::vector<corpus::TaggedStatement>& dataset) {
  std::vector<corpus::TaggedStatement> out;
  for (const auto& tagged : dataset)
    if (!state.proved.count(tagged.statement.text())) out.push_back(tagged);
  return out;
}

// Proved (statement, proof) pairs in ascending statement-text order; the
// stored proofs keep their first-come order.
std::vector<std::pair<kernel::Statement, kernel::Proof>> proved_pairs(const RunState& state) {
  std::vector<std::pair<kernel::Statement, kernel::Proof>> out;
  for (const auto& [text, entry] : state.proved)
    for (const auto& stored : entry.proofs)
      out.emplace_back(entry.statement, kernel::parse_proof(stored.proof_text));
  return out;
}

// Registers the iteration's verified proofs: updates the proved set for
// dataset statements and appends refresh-qualifying proofs to the history.
// Returns the number of newly proved dataset statements.
int absorb_attempts(RunState& state, const std::vector<ProofTarget>& targets,
                    const std::vector<AttemptRecord>& attempts, const PassRateTable& rates,
                    const RunConfig& config, int iteration, bool track_history) {
  const std::size_t k = attempts.size() / std::max<std::size_t>(1, targets.size());
  int newly_proved = 0;

  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const ProofTarget& target = targets[ti];
    const std::string text = target.statement.text();
    const double pass = rates.pass_rate(text);

    std::vector<const AttemptRecord*> verified;
    std::unordered_set<std::string> distinct;
    for (std::size_t j = 0; j < k; ++j) {
      const AttemptRecord& rec = attempts[ti * k + j];
      if (!rec.verified()) continue;
      if (distinct.insert(rec.proof->text()).second) verified.push_back(&rec);
    }
    if (verified.empty()) continue;

    if (target.kind == AttemptKind::dataset_statement) {
      auto [it, inserted] = state.proved.emplace(text, ProvedEntry{target.statement, {}, iteration});
      if (inserted) ++newly_proved;
      std::unordered_set<std::string> existing;
      for (const auto& stored : it->second.proofs) existing.insert(stored.proof_text);
      for (const AttemptRecord* rec : verified) {
        if (it->second.proofs.size() >= static_cast<std::size_t>(config.max_proofs_per_statement))
          break;
        std::string canonical = rec->proof->text();
        if (existing.insert(canonical).second)
          it->second.proofs.push_back(
              StoredProof{std::move(canonical), rec->proof_length(), rec->outcome.cost});
      }
    }

    if (track_history && pass <= config.final_retrain_pass_max) {
      for (const AttemptRecord* rec : verified) {
        std::string canonical = rec->proof->text();
        std::string key = text + "\x1f" + canonical;
        if (!state.history_keys.insert(key).second) continue;
        state.history.push_back(HistoryEntry{target.kind, text, std::move(canonical),
                                             rec->proof_length(), rec->outcome.cost, pass,
                                             iteration});
      }
    }
  }
  return newly_proved;
}

}  // namespace

std::vector<WeightedExample> retraining_dataset(const RunState& state, const RunConfig& config,
                                                int iteration) {
  std::map<std::string, std::vector<const HistoryEntry*>> by_target;
  for (const HistoryEntry& h : state.history) {
    if (h.pass_rate > config.final_retrain_pass_max) continue;
    by_target[h.target_text].push_back(&h);
  }

  std::vector<WeightedExample> out;
  std::uint64_t target_index = 0;
  for (const auto& [text, entries] : by_target) {
    std::vector<std::size_t> keep;
    const std::size_t cap = static_cast<std::size_t>(config.max_proofs_per_statement);
    if (entries.size() <= cap) {
      for (std::size_t i = 0; i < entries.size(); ++i) keep.push_back(i);
    } else {
      util::Rng rng(util::derive_seed(config.seed, static_cast<std::uint64_t>(iteration),
                                      kPhaseRefreshChoice, target_index));
      keep = rng.subset(entries.size(), cap);
    }
    const double v = static_cast<double>(keep.size());
    kernel::Statement statement = kernel::parse_statement(text);
    for (std::size_t i : keep) {
      const HistoryEntry* h = entries[i];
      double weight = (1.0 / v) * std::pow(config.gamma, static_cast<double>(h->length)) *
                      std::pow(config.beta, static_cast<double>(h->cost));
      out.push_back(WeightedExample{PromptRecord::prover(statement), h->proof_text, weight});
    }
    ++target_index;
  }
  return out;
}

namespace {

std::vector<std::string> sample_conjectures(const std::vector<PromptRecord>& inputs,
                                            const PolicySet& current, const RunConfig& config,
                                            int iteration) {
  std::vector<std::string> completions(inputs.size());
  util::parallel_for(inputs.size(), config.workers, [&](std::size_t i) {
    std::uint64_t seed = util::derive_seed(config.seed, static_cast<std::uint64_t>(iteration),
                                           kPhaseConjectureSampling, i);
    completions[i] =
        current.sample(inputs[i], config.conjecturer_temperature, config.max_tokens, seed);
  });
  return completions;
}

}  // namespace

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::stp: return "stp";
    case RunMode::expert_vanilla: return "expert-vanilla";
    case RunMode::expert_opt: return "expert-opt";
    case RunMode::parallel: return "parallel";
  }
  return "stp";
}

RunMode run_mode_from(const std::string& name) {
  if (name == "stp") return RunMode::stp;
  if (name == "expert-vanilla") return RunMode::expert_vanilla;
  if (name == "expert-opt") return RunMode::expert_opt;
  if (name == "parallel") return RunMode::parallel;
  throw ConfigError("unknown run mode: " + name);
}

IterationArtifacts stp_iteration(RunState& state, PolicySet& current, const PolicySet& base,
                                 const StepContext& ctx) {
  const RunConfig& config = ctx.config;
  const int iter = state.iteration + 1;

  IterationArtifacts art;
  art.iteration = iter;

  auto unproved = unproved_statements(state, ctx.dataset);
  art.unproved_count = static_cast<int>(unproved.size());
  std::unordered_set<std::string> unproved_texts;
  for (const auto& tagged : unproved) unproved_texts.insert(tagged.statement.text());

  // Step 1: conjecturer inputs and conjecture sampling (one per prompt)
  art.conjecturer_inputs = select_conjecturer_inputs(
      proved_pairs(state), config,
      util::derive_seed(config.seed, static_cast<std::uint64_t>(iter), kPhaseConjecturerInputs));
  std::vector<std::string> completions =
      sample_conjectures(art.conjecturer_inputs, current, config, iter);
  art.conjectures_generated = static_cast<int>(completions.size());

  // parse, filter, de-duplicate
  struct Candidate {
    kernel::Statement statement;
    ConjectureProvenance provenance;
    std::size_t log_index;
  };
  std::vector<Candidate> candidates;
  std::unordered_set<std::string> candidate_texts;
  const kernel::TermLimits limits = config.term_limits();
  const std::string terminal = std::string(" ") + "</hard theorem>";

  for (std::size_t i = 0; i < completions.size(); ++i) {
    const PromptRecord& input = art.conjecturer_inputs[i];
    util::Json row;
    row["index"] = i;
    row["raw"] = completions[i];
    row["statement"] = nullptr;
    std::string status;

    std::optional<kernel::Statement> parsed;
    std::string text = completions[i];
    if (text.size() > terminal.size() &&
        text.compare(text.size() - terminal.size(), terminal.size(), terminal) == 0) {
      try {
        parsed = kernel::parse_statement(text.substr(0, text.size() - terminal.size()), limits);
      } catch (const Error&) {
      }
    }

    if (!parsed) {
      status = "unparseable";
    } else if (!triviality_filter_accepts(*parsed, *input.seed_statement, ctx.library)) {
      status = "trivial";
    } else if (unproved_texts.count(parsed->text())) {
      status = "dataset-collision";
    } else if (!candidate_texts.insert(parsed->text()).second) {
      status = "duplicate";
    } else {
      status = "candidate";
      row["statement"] = parsed->text();
      candidates.push_back(Candidate{
          *parsed,
          ConjectureProvenance{*input.seed_statement, *input.seed_proof, *input.lemma}, i});
    }
    row["status"] = status;
    art.conjecture_log.push_back(std::move(row));
  }

  // cap at the number of unproved statements
  auto kept_indices = cap_conjectures_indices(
      candidates.size(), unproved.size(),
      util::derive_seed(config.seed, static_cast<std::uint64_t>(iter), kPhaseConjectureCap));
  std::unordered_set<std::size_t> kept_set(kept_indices.begin(), kept_indices.end());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto& row = art.conjecture_log[candidates[c].log_index];
    row["status"] = kept_set.count(c) ? "kept" : "capped";
  }

  // Step 2: prover targets = kept conjectures + all unproved statements
  for (std::size_t c : kept_indices)
    art.targets.push_back(ProofTarget{AttemptKind::conjecture, candidates[c].statement, "",
                                      candidates[c].provenance});
  art.conjectures_kept = static_cast<int>(kept_indices.size());
  for (const auto& tagged : unproved)
    art.targets.push_back(
        ProofTarget{AttemptKind::dataset_statement, tagged.statement, tagged.source, std::nullopt});

  // Steps 2-3: sample and verify
  art.attempts = sample_and_verify(
      art.targets, current, config.K, ctx.library, config,
      util::derive_seed(config.seed, static_cast<std::uint64_t>(iter), kPhaseProofSampling));
  art.rates = compute_pass_rates(art.attempts);

  // Step 4: curation
  art.conjecturer_dataset =
      build_conjecturer_dataset(art.attempts, art.rates, unproved, config, iter);
  art.prover_dataset = build_prover_dataset(art.attempts, art.rates, config);

  // Step 5: replay push and full retrain from the base counts
  state.replay.push_back(art.prover_dataset);
  while (state.replay.size() > static_cast<std::size_t>(config.replay_iters))
    state.replay.pop_front();

  std::vector<WeightedExample> training;
  for (const auto& slot : state.replay) training.insert(training.end(), slot.begin(), slot.end());
  training.insert(training.end(), art.conjecturer_dataset.examples.begin(),
                  art.conjecturer_dataset.examples.end());
  PolicySet retrained = base;
  retrained.train(training);
  current = std::move(retrained);

  art.newly_proved = absorb_attempts(state, art.targets, art.attempts, art.rates, config, iter,
                                     /*track_history=*/true);
  state.cumulative_proofs +=
      static_cast<long long>(config.K) * static_cast<long long>(art.targets.size());
  state.iteration = iter;
  return art;
}

IterationArtifacts expert_iteration_step(RunState& state, PolicySet& current,
                                         const PolicySet& sft_base, const StepContext& ctx,
                                         bool optimized) {
  const RunConfig& config = ctx.config;
  const int iter = state.iteration + 1;

  IterationArtifacts art;
  art.iteration = iter;

  auto unproved = unproved_statements(state, ctx.dataset);
  art.unproved_count = static_cast<int>(unproved.size());

  const auto& sampled = optimized ? ctx.dataset : unproved;
  for (const auto& tagged : sampled)
    art.targets.push_back(
        ProofTarget{AttemptKind::dataset_statement, tagged.statement, tagged.source, std::nullopt});

  art.attempts = sample_and_verify(
      art.targets, current, config.K_baseline, ctx.library, config,
      util::derive_seed(config.seed, static_cast<std::uint64_t>(iter), kPhaseProofSampling));
  art.rates = compute_pass_rates(art.attempts);

  // accumulate every distinct correct proof into the per-statement pool
  const std::size_t store_cap = static_cast<std::size_t>(config.max_proofs_per_statement) * 4;
  for (const AttemptRecord& rec : art.attempts) {
    if (!rec.verified()) continue;
    auto& pool = state.ei_proofs[rec.target.text()];
    if (pool.size() >= store_cap) continue;
    std::string canonical = rec.proof->text();
    bool known = false;
    for (const auto& stored : pool) known = known || stored.proof_text == canonical;
    if (!known)
      pool.push_back(StoredProof{std::move(canonical), rec.proof_length(), rec.outcome.cost});
  }

  // vanilla trains on the whole pool; optimized takes a seeded subset of at
  // most max_proofs_per_statement proofs per statement
  std::vector<WeightedExample> training;
  std::uint64_t statement_index = 0;
  for (const auto& [text, pool] : state.ei_proofs) {
    kernel::Statement statement = kernel::parse_statement(text);
    std::vector<std::size_t> keep;
    const std::size_t cap = static_cast<std::size_t>(config.max_proofs_per_statement);
    if (!optimized || pool.size() <= cap) {
      for (std::size_t i = 0; i < pool.size(); ++i) keep.push_back(i);
    } else {
      util::Rng rng(util::derive_seed(config.seed, static_cast<std::uint64_t>(iter),
                                      kPhaseExpertCap, statement_index));
      keep = rng.subset(pool.size(), cap);
    }
    for (std::size_t i : keep)
      training.push_back(WeightedExample{PromptRecord::prover(statement), pool[i].proof_text, 1.0});
    ++statement_index;
  }
  art.prover_dataset = training;
  PolicySet retrained = sft_base;
  retrained.train(training);
  current = std::move(retrained);

  art.newly_proved = absorb_attempts(state, art.targets, art.attempts, art.rates, config, iter,
                                     /*track_history=*/false);
  state.cumulative_proofs +=
      static_cast<long long>(config.K_baseline) * static_cast<long long>(art.targets.size());
  state.iteration = iter;
  return art;
}

IterationArtifacts parallel_sampling_step(RunState& state, const PolicySet& current,
                                          const StepContext& ctx) {
  const RunConfig& config = ctx.config;
  const int iter = state.iteration + 1;

  IterationArtifacts art;
  art.iteration = iter;

  auto unproved = unproved_statements(state, ctx.dataset);
  art.unproved_count = static_cast<int>(unproved.size());
  for (const auto& tagged : unproved)
    art.targets.push_back(
        ProofTarget{AttemptKind::dataset_statement, tagged.statement, tagged.source, std::nullopt});

  art.attempts = sample_and_verify(
      art.targets, current, config.K_baseline, ctx.library, config,
      util::derive_seed(config.seed, static_cast<std::uint64_t>(iter), kPhaseProofSampling));
  art.rates = compute_pass_rates(art.attempts);

  art.newly_proved = absorb_attempts(state, art.targets, art.attempts, art.rates, config, iter,
                                     /*track_history=*/false);
  state.cumulative_proofs +=
      static_cast<long long>(config.K_baseline) * static_cast<long long>(art.targets.size());
  state.iteration = iter;
  return art;
}

void periodic_refresh(RunState& state, PolicySet& base, PolicySet& current,
                      const std::vector<WeightedExample>& sft_examples, const StepContext& ctx) {
  std::vector<WeightedExample> data = retraining_dataset(state, ctx.config, state.iteration);
  PolicySet rebuilt(ctx.config.ngram_order, ctx.config.alpha, ctx.config.split_roles);
  rebuilt.train(sft_examples);
  rebuilt.train(data);
  base = rebuilt;
  current = std::move(rebuilt);
  state.replay.clear();
}

PolicySet final_retrain(const RunState& state, const std::vector<WeightedExample>& sft_examples,
                        const StepContext& ctx) {
  std::vector<WeightedExample> data = retraining_dataset(state, ctx.config, state.iteration);
  PolicySet rebuilt(ctx.config.ngram_order, ctx.config.alpha, ctx.config.split_roles);
  rebuilt.train(sft_examples);
  rebuilt.train(data);
  return rebuilt;
}

std::vector<WeightedExample> load_sft_examples(const std::filesystem::path& sft_dir) {
  std::vector<WeightedExample> out;
  for (const char* name : {"conjecturer_sft.jsonl", "prover_sft.jsonl"}) {
    auto path = sft_dir / name;
    if (!std::filesystem::exists(path))
      throw ConfigError("missing SFT dataset file: " + path.string());
    for (const auto& row : util::read_jsonl(path)) out.push_back(WeightedExample::from_json(row));
  }
  return out;
}

Runner::Runner(std::filesystem::path run_dir, const RunConfig& config, RunMode mode, bool resume)
    : run_dir_(std::move(run_dir)), config_(config), mode_(mode) {
  if (resume) {
    load_existing();
  } else {
    init_fresh();
  }
}

void Runner::init_fresh() {
  config_.validate();
  if (config_.dataset_path.empty()) throw ConfigError("config needs dataset_path");
  if (config_.sft_dir.empty()) throw ConfigError("config needs sft_dir");

  library_ = config_.rules_path.empty() ? kernel::RuleLibrary::builtin()
                                        : kernel::RuleLibrary::load(config_.rules_path);
  dataset_ = corpus::load_unproved_dataset(config_.dataset_path, "main", config_.term_limits());
  if (!config_.valid_dataset_path.empty()) {
    auto valid =
        corpus::load_unproved_dataset(config_.valid_dataset_path, "valid", config_.term_limits());
    dataset_.insert(dataset_.end(), valid.begin(), valid.end());
  }
  sft_examples_ = load_sft_examples(config_.sft_dir);
  for (auto& ex : sft_examples_) ex.weight *= config_.sft_scale;

  sft_base_ = PolicySet(config_.ngram_order, config_.alpha, config_.split_roles);
  sft_base_.train(sft_examples_);
  base_ = sft_base_;
  current_ = sft_base_;
  state_ = RunState{};

  std::filesystem::create_directories(run_dir_ / "model");
  std::filesystem::create_directories(run_dir_ / "iterations");
  config_.save(run_dir_ / "config.json");
  util::write_text_file(run_dir_ / "report.jsonl", "");
  persist();
}

void Runner::load_existing() {
  auto config_path = run_dir_ / "config.json";
  if (!std::filesystem::exists(config_path))
    throw ConfigError("cannot resume: missing " + config_path.string());
  config_ = RunConfig::load(config_path);

  library_ = config_.rules_path.empty() ? kernel::RuleLibrary::builtin()
                                        : kernel::RuleLibrary::load(config_.rules_path);
  dataset_ = corpus::load_unproved_dataset(config_.dataset_path, "main", config_.term_limits());
  if (!config_.valid_dataset_path.empty()) {
    auto valid =
        corpus::load_unproved_dataset(config_.valid_dataset_path, "valid", config_.term_limits());
    dataset_.insert(dataset_.end(), valid.begin(), valid.end());
  }
  sft_examples_ = load_sft_examples(config_.sft_dir);
  for (auto& ex : sft_examples_) ex.weight *= config_.sft_scale;

  sft_base_ = PolicySet(config_.ngram_order, config_.alpha, config_.split_roles);
  sft_base_.train(sft_examples_);

  state_ = RunState::from_json(util::Json::parse(util::read_text_file(run_dir_ / "state.json")));
  base_ = PolicySet::load(run_dir_ / "model", "base", config_.split_roles);
  current_ = PolicySet::load(run_dir_ / "model", "current", config_.split_roles);
}

std::filesystem::path Runner::iteration_dir(const std::filesystem::path& run_dir, int iteration) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", iteration);
  return run_dir / "iterations" / buf;
}

void Runner::write_artifacts(const IterationArtifacts& art) {
  auto dir = iteration_dir(run_dir_, art.iteration);
  std::filesystem::create_directories(dir);

  if (mode_ == RunMode::stp) {
    std::vector<util::Json> input_rows;
    for (const auto& p : art.conjecturer_inputs) input_rows.push_back(p.to_json());
    util::write_jsonl(dir / "conjecturer_inputs.jsonl", input_rows);
    util::write_jsonl(dir / "conjectures.jsonl", art.conjecture_log);

    std::vector<util::Json> conj_rows;
    for (const auto& ex : art.conjecturer_dataset.examples) conj_rows.push_back(ex.to_json());
    util::write_jsonl(dir / "conjecturer_dataset.jsonl", conj_rows);
  }

  std::vector<util::Json> attempt_rows;
  attempt_rows.reserve(art.attempts.size());
  for (const auto& rec : art.attempts) attempt_rows.push_back(rec.to_json());
  util::write_jsonl(dir / "attempts.jsonl", attempt_rows);

  if (mode_ != RunMode::parallel) {
    std::vector<util::Json> prover_rows;
    for (const auto& ex : art.prover_dataset) prover_rows.push_back(ex.to_json());
    util::write_jsonl(dir / "prover_dataset.jsonl", prover_rows);
  }
}

void Runner::persist() {
  util::write_text_file(run_dir_ / "state.json", state_.to_json().dump() + "\n");
  base_.save(run_dir_ / "model", "base");
  current_.save(run_dir_ / "model", "current");
}

void Runner::run_to(int target_iterations) {
  StepContext ctx{library_, config_, dataset_};
  while (state_.iteration < target_iterations) {
    auto started = std::chrono::steady_clock::now();
    RunState backup = state_;
    PolicySet current_backup = current_;
    IterationArtifacts art;
    try {
      switch (mode_) {
        case RunMode::stp:
          art = stp_iteration(state_, current_, base_, ctx);
          break;
        case RunMode::expert_vanilla:
          art = expert_iteration_step(state_, current_, sft_base_, ctx, false);
          break;
        case RunMode::expert_opt:
          art = expert_iteration_step(state_, current_, sft_base_, ctx, true);
          break;
        case RunMode::parallel:
          art = parallel_sampling_step(state_, current_, ctx);
          break;
      }
      write_artifacts(art);
      report::record_iteration(run_dir_, art, state_, ctx);
    } catch (...) {
      state_ = std::move(backup);
      current_ = std::move(current_backup);
      throw;
    }

    if (mode_ == RunMode::stp && state_.iteration % config_.refresh_every == 0)
      periodic_refresh(state_, base_, current_, sft_examples_, ctx);

    persist();

    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    std::cerr << "[" << run_mode_name(mode_) << "] iteration " << state_.iteration << ": proved "
              << state_.proved.size() << "/" << dataset_.size() << ", +" << art.newly_proved
              << " new, " << art.targets.size() << " targets, " << elapsed << " ms\n";
  }
}

PolicySet Runner::final_retrain_model() const {
  StepContext ctx{library_, config_, dataset_};
  return final_retrain(state_, sft_examples_, ctx);
}

}  // namespace stp::selfplay
