#include "selfplay/curation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "selfplay/reweight.hpp"
#include "util/pool.hpp"
#include "util/rng.hpp"

namespace stp::selfplay {

using policy::PromptRecord;
using policy::WeightedExample;

std::vector<PromptRecord> select_conjecturer_inputs(
    const std::vector<std::pair<kernel::Statement, kernel::Proof>>& proved_pairs,
    const RunConfig& config, std::uint64_t seed) {
  util::Rng rng(seed);

  struct Candidate {
    std::size_t pair_index;
    std::string lemma;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < proved_pairs.size(); ++i) {
    // for a verified proof the used lemmas are exactly its rewrite rule names
    std::set<std::string> lemmas;
    for (const auto& step : proved_pairs[i].second.steps)
      if (step.kind == kernel::ProofStep::Kind::rewrite) lemmas.insert(step.rule_name);
    if (rng.bernoulli(config.trivial_lemma_prob)) lemmas.insert("trivial");
    for (const auto& lemma : lemmas) candidates.push_back(Candidate{i, lemma});
  }

  // per-lemma cap over the candidate list
  const std::size_t n = candidates.size();
  const std::size_t cap = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.lemma_cap_frac * static_cast<double>(n))));

  std::map<std::string, std::vector<std::size_t>> by_lemma;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    by_lemma[candidates[c].lemma].push_back(c);

  std::vector<bool> keep(candidates.size(), true);
  for (const auto& [lemma, group] : by_lemma) {
    if (group.size() <= cap) continue;
    for (std::size_t c : group) keep[c] = false;
    for (std::size_t pick : rng.subset(group.size(), cap)) keep[group[pick]] = true;
  }

  // one prompt per distinct (statement, lemma)
  std::set<std::pair<std::string, std::string>> emitted;
  std::vector<PromptRecord> out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!keep[c]) continue;
    const auto& [pair_index, lemma] = candidates[c];
    const auto& [statement, proof] = proved_pairs[pair_index];
    if (!emitted.emplace(statement.text(), lemma).second) continue;
    out.push_back(PromptRecord::conjecturer(lemma, statement, proof));
  }
  return out;
}

std::vector<std::size_t> cap_conjectures_indices(std::size_t count, std::size_t unproved_count,
                                                 std::uint64_t seed) {
  util::Rng rng(seed);
  return rng.subset(count, std::min(count, unproved_count));
}

bool triviality_filter_accepts(const kernel::Statement& conjecture,
                               const kernel::Statement& seed_statement,
                               const kernel::RuleLibrary& library) {
  if (conjecture.text() == seed_statement.text()) return false;
  kernel::Proof refl{{kernel::ProofStep::refl()}};
  if (kernel::verify(conjecture, refl, library).verified) return false;
  kernel::Proof eval{{kernel::ProofStep::eval()}};
  if (kernel::verify(conjecture, eval, library).verified) return false;
  return true;
}

std::vector<AttemptRecord> sample_and_verify(const std::vector<ProofTarget>& targets,
                                             const PolicySet& policies, int samples_per_target,
                                             const kernel::RuleLibrary& library,
                                             const RunConfig& config, std::uint64_t seed_base) {
  if (samples_per_target < 1) throw ConfigError("samples_per_target must be at least 1");
  const std::size_t k = static_cast<std::size_t>(samples_per_target);
  std::vector<AttemptRecord> records(targets.size() * k);
  const kernel::TermLimits limits = config.term_limits();

  util::parallel_for(records.size(), config.workers, [&](std::size_t task) {
    const std::size_t ti = task / k;
    const int j = static_cast<int>(task % k);
    const ProofTarget& target = targets[ti];

    AttemptRecord& rec = records[task];
    rec.kind = target.kind;
    rec.provenance = target.provenance;
    rec.target = target.statement;
    rec.sample_index = j;
    rec.source = target.source;

    PromptRecord prompt = PromptRecord::prover(target.statement);
    std::uint64_t seed = util::derive_seed(seed_base, ti, static_cast<std::uint64_t>(j));
    rec.proof_text =
        policies.sample(prompt, config.prover_temperature, config.max_tokens, seed);

    try {
      rec.proof = kernel::parse_proof(rec.proof_text, limits);
    } catch (const Error&) {
      rec.outcome.verified = false;
      rec.outcome.failure_reason = "parse";
      return;
    }
    rec.outcome = kernel::verify(target.statement, *rec.proof, library, config.step_budget);
  });
  return records;
}

PassRateTable compute_pass_rates(const std::vector<AttemptRecord>& attempts) {
  PassRateTable table;
  for (const AttemptRecord& rec : attempts) table.record(rec.target.text(), rec.verified());
  return table;
}

std::map<std::string, double> elegancy_scores(const std::vector<AttemptRecord>& attempts) {
  std::map<std::string, int> min_length;
  for (const AttemptRecord& rec : attempts) {
    if (!rec.verified()) continue;
    int len = rec.proof_length();
    auto [it, inserted] = min_length.emplace(rec.target.text(), len);
    if (!inserted && len < it->second) it->second = len;
  }
  std::map<std::string, double> out;
  for (const auto& [text, len] : min_length)
    out[text] = static_cast<double>(len) / static_cast<double>(text.size());
  return out;
}

ConjecturerDatasetResult build_conjecturer_dataset(
    const std::vector<AttemptRecord>& attempts, const PassRateTable& rates,
    const std::vector<corpus::TaggedStatement>& unproved, const RunConfig& config, int iteration) {
  ConjecturerDatasetResult result;

  // stage 1: band (0, pass_band_max], correct proof, prompt lemma used
  std::vector<const AttemptRecord*> selected;
  for (const AttemptRecord& rec : attempts) {
    if (rec.kind != AttemptKind::conjecture || !rec.verified() || !rec.provenance) continue;
    double p = rates.pass_rate(rec.target.text());
    if (!(p > 0.0 && p <= config.pass_band_max)) continue;
    if (!rec.outcome.used_lemmas.count(rec.provenance->lemma)) continue;
    selected.push_back(&rec);
  }
  result.band_selected = static_cast<int>(selected.size());

  // stage 2: de-duplicate by conjecture text, first record wins
  std::vector<const AttemptRecord*> distinct;
  std::unordered_set<std::string> seen;
  for (const AttemptRecord* rec : selected)
    if (seen.insert(rec->target.text()).second) distinct.push_back(rec);
  result.distinct = static_cast<int>(distinct.size());
  if (distinct.empty()) return result;

  // stage 3: elegancy filter drops the lowest floor(q * N) scores,
  // ties broken by conjecture canonical text
  std::map<std::string, double> scores = elegancy_scores(attempts);
  std::vector<std::size_t> order(distinct.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double ea = scores.at(distinct[a]->target.text());
    double eb = scores.at(distinct[b]->target.text());
    if (ea != eb) return ea < eb;
    return distinct[a]->target.text() < distinct[b]->target.text();
  });
  const std::size_t remove =
      static_cast<std::size_t>(std::floor(config.elegancy_quantile *
                                          static_cast<double>(distinct.size())));
  result.elegancy_removed = static_cast<int>(remove);
  std::vector<bool> removed(distinct.size(), false);
  for (std::size_t i = 0; i < remove; ++i) removed[order[i]] = true;
  std::vector<const AttemptRecord*> survivors;
  for (std::size_t i = 0; i < distinct.size(); ++i)
    if (!removed[i]) survivors.push_back(distinct[i]);
  if (survivors.empty() || unproved.empty()) return result;

  // stage 4: re-weight toward the unproved statements
  ReweightProblem problem;
  problem.cap = config.cap;
  for (const AttemptRecord* rec : survivors)
    problem.conjectures.push_back(policy::embed(rec->target));
  for (const auto& tagged : unproved) {
    problem.statement_embeddings.push_back(policy::embed(tagged.statement));
    problem.statement_keys.push_back(tagged.statement.text());
    problem.matching_weights.push_back(config.matching_weight(tagged.source, iteration));
  }
  std::vector<double> weights;
  try {
    weights = wasserstein_reweight(problem).weights;
  } catch (const InfeasibleError& e) {
    std::cerr << "[conjecturer dataset] re-weighting infeasible, emitting empty dataset: "
              << e.what() << "\n";
    return result;
  }

  // stage 5: weighted examples; zero-mass survivors are dropped
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (weights[i] <= 0.0) {
      ++result.weighted_zero;
      continue;
    }
    const AttemptRecord* rec = survivors[i];
    result.examples.push_back(WeightedExample{
        PromptRecord::conjecturer(rec->provenance->lemma, rec->provenance->seed_statement,
                                  rec->provenance->seed_proof),
        rec->target.text() + " </hard theorem>", weights[i]});
  }
  return result;
}

std::vector<WeightedExample> build_prover_dataset(const std::vector<AttemptRecord>& attempts,
                                                  const PassRateTable& rates,
                                                  const RunConfig& config) {
  struct Kept {
    const AttemptRecord* rec;
    std::string proof_text;  // canonical
  };
  std::vector<Kept> kept;
  std::unordered_set<std::string> seen;
  std::unordered_map<std::string, int> distinct_per_target;

  for (const AttemptRecord& rec : attempts) {
    if (!rec.verified()) continue;
    if (!(rates.pass_rate(rec.target.text()) < config.prover_pass_max)) continue;
    std::string canonical = rec.proof->text();
    std::string key = rec.target.text() + "\x1f" + canonical;
    if (!seen.insert(std::move(key)).second) continue;
    ++distinct_per_target[rec.target.text()];
    kept.push_back(Kept{&rec, std::move(canonical)});
  }

  std::vector<WeightedExample> out;
  out.reserve(kept.size());
  for (const Kept& k : kept) {
    int v = distinct_per_target.at(k.rec->target.text());
    double weight = (1.0 / static_cast<double>(v)) *
                    std::pow(config.gamma, static_cast<double>(k.proof_text.size())) *
                    std::pow(config.beta, static_cast<double>(k.rec->outcome.cost));
    out.push_back(WeightedExample{PromptRecord::prover(k.rec->target), k.proof_text, weight});
  }
  return out;
}

util::Json AttemptRecord::to_json() const {
  util::Json j;
  j["kind"] = attempt_kind_name(kind);
  j["seed_statement"] =
      provenance ? util::Json(provenance->seed_statement.text()) : util::Json(nullptr);
  j["seed_proof"] = provenance ? util::Json(provenance->seed_proof.text()) : util::Json(nullptr);
  j["lemma"] = provenance ? util::Json(provenance->lemma) : util::Json(nullptr);
  j["target"] = target.text();
  j["proof"] = proof_text;
  j["verdict"] = outcome.verdict_text();
  util::Json lemmas = util::Json::array();
  for (const auto& l : outcome.used_lemmas) lemmas.push_back(l);
  j["used_lemmas"] = lemmas;
  j["length"] = proof_length();
  j["cost"] = outcome.cost;
  j["sample_index"] = sample_index;
  return j;
}

}  // namespace stp::selfplay
