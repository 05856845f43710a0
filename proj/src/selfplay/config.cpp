#include "selfplay/config.hpp"

#include "util/error.hpp"

namespace stp::selfplay {

int RunConfig::matching_weight(const std::string& source, int iteration) const {
  const auto* table = &matching_weights;
  if (matching_weights_switch_iter > 0 && iteration > matching_weights_switch_iter &&
      !matching_weights_after.empty())
    table = &matching_weights_after;
  auto it = table->find(source);
  if (it != table->end()) return it->second;
  return 1;
}

void RunConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (K < 1 || K_baseline < 1) throw ConfigError("K and K_baseline must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must be in (0, 1)");
  if (!in_unit(pass_band_max) || !in_unit(prover_pass_max) || !in_unit(elegancy_quantile) ||
      !in_unit(trivial_lemma_prob) || !in_unit(final_retrain_pass_max) || !in_unit(lemma_cap_frac))
    throw ConfigError("rates must lie in [0, 1]");
  if (cap <= 0) throw ConfigError("cap must be positive");
  if (replay_iters < 1) throw ConfigError("replay_iters must be at least 1");
  if (refresh_every < 1) throw ConfigError("refresh_every must be at least 1");
  if (max_proofs_per_statement < 1) throw ConfigError("max_proofs_per_statement must be at least 1");
  if (conjecturer_temperature <= 0 || prover_temperature <= 0)
    throw ConfigError("temperatures must be positive");
  if (max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
  if (step_budget < 1) throw ConfigError("step_budget must be at least 1");
  if (workers < 0) throw ConfigError("workers must be non-negative");
  if (sft_scale <= 0) throw ConfigError("sft_scale must be positive");
  for (const auto& [tag, k] : matching_weights)
    if (k < 1) throw ConfigError("matching weight for '" + tag + "' must be at least 1");
  for (const auto& [tag, k] : matching_weights_after)
    if (k < 1) throw ConfigError("matching weight for '" + tag + "' must be at least 1");
}

util::Json RunConfig::to_json() const {
  util::Json j;
  j["K"] = K;
  j["K_baseline"] = K_baseline;
  j["gamma"] = gamma;
  j["beta"] = beta;
  j["pass_band_max"] = pass_band_max;
  j["prover_pass_max"] = prover_pass_max;
  j["elegancy_quantile"] = elegancy_quantile;
  j["cap"] = cap;
  j["replay_iters"] = replay_iters;
  j["refresh_every"] = refresh_every;
  j["lemma_cap_frac"] = lemma_cap_frac;
  j["trivial_lemma_prob"] = trivial_lemma_prob;
  j["final_retrain_pass_max"] = final_retrain_pass_max;
  j["max_proofs_per_statement"] = max_proofs_per_statement;
  j["conjecturer_temperature"] = conjecturer_temperature;
  j["prover_temperature"] = prover_temperature;
  j["max_tokens"] = max_tokens;
  j["step_budget"] = step_budget;
  j["seed"] = seed;
  j["ngram_order"] = ngram_order;
  j["alpha"] = alpha;
  j["split_roles"] = split_roles;
  j["sft_scale"] = sft_scale;
  j["max_term_depth"] = max_term_depth;
  j["max_literal"] = max_literal;
  j["workers"] = workers;
  j["matching_weights"] = matching_weights;
  j["matching_weights_after"] = matching_weights_after;
  j["matching_weights_switch_iter"] = matching_weights_switch_iter;
  j["dataset_path"] = dataset_path;
  j["valid_dataset_path"] = valid_dataset_path;
  j["sft_dir"] = sft_dir;
  j["rules_path"] = rules_path;
  return j;
}

RunConfig RunConfig::from_json(const util::Json& j) {
  RunConfig c;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "K") c.K = value.get<int>();
      else if (key == "K_baseline") c.K_baseline = value.get<int>();
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "beta") c.beta = value.get<double>();
      else if (key == "pass_band_max") c.pass_band_max = value.get<double>();
      else if (key == "prover_pass_max") c.prover_pass_max = value.get<double>();
      else if (key == "elegancy_quantile") c.elegancy_quantile = value.get<double>();
      else if (key == "cap") c.cap = value.get<double>();
      else if (key == "replay_iters") c.replay_iters = value.get<int>();
      else if (key == "refresh_every") c.refresh_every = value.get<int>();
      else if (key == "lemma_cap_frac") c.lemma_cap_frac = value.get<double>();
      else if (key == "trivial_lemma_prob") c.trivial_lemma_prob = value.get<double>();
      else if (key == "final_retrain_pass_max") c.final_retrain_pass_max = value.get<double>();
      else if (key == "max_proofs_per_statement") c.max_proofs_per_statement = value.get<int>();
      else if (key == "conjecturer_temperature") c.conjecturer_temperature = value.get<double>();
      else if (key == "prover_temperature") c.prover_temperature = value.get<double>();
      else if (key == "max_tokens") c.max_tokens = value.get<int>();
      else if (key == "step_budget") c.step_budget = value.get<long long>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "ngram_order") c.ngram_order = value.get<int>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "split_roles") c.split_roles = value.get<bool>();
      else if (key == "sft_scale") c.sft_scale = value.get<double>();
      else if (key == "max_term_depth") c.max_term_depth = value.get<int>();
      else if (key == "max_literal") c.max_literal = value.get<std::uint64_t>();
      else if (key == "workers") c.workers = value.get<int>();
      else if (key == "matching_weights") c.matching_weights = value.get<std::map<std::string, int>>();
      else if (key == "matching_weights_after") c.matching_weights_after = value.get<std::map<std::string, int>>();
      else if (key == "matching_weights_switch_iter") c.matching_weights_switch_iter = value.get<int>();
      else if (key == "dataset_path") c.dataset_path = value.get<std::string>();
      else if (key == "valid_dataset_path") c.valid_dataset_path = value.get<std::string>();
      else if (key == "sft_dir") c.sft_dir = value.get<std::string>();
      else if (key == "rules_path") c.rules_path = value.get<std::string>();
      else throw ConfigError("unknown config key: " + key);
    } catch (const util::Json::exception&) {
      throw ConfigError("bad value for config key: " + key);
    }
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  util::Json j;
  try {
    j = util::Json::parse(util::read_text_file(file));
  } catch (const util::Json::exception& e) {
    throw ConfigError("cannot parse config " + file.string() + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::save(const std::filesystem::path& file) const {
  util::write_text_file(file, to_json().dump(2) + "\n");
}

}  // namespace stp::selfplay
