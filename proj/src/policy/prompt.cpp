#include "policy/prompt.hpp"

#include "policy/tokenizer.hpp"
#include "util/error.hpp"

namespace stp::policy {

PromptRecord PromptRecord::conjecturer(std::string lemma, kernel::Statement seed,
                                       kernel::Proof seed_proof) {
  PromptRecord p;
  p.role = Role::conjecturer;
  p.lemma = std::move(lemma);
  p.seed_statement = std::move(seed);
  p.seed_proof = std::move(seed_proof);
  return p;
}

PromptRecord PromptRecord::prover(kernel::Statement target) {
  PromptRecord p;
  p.role = Role::prover;
  p.target_statement = std::move(target);
  return p;
}

std::vector<std::string> PromptRecord::tokens() const {
  std::vector<std::string> out;
  auto append = [&out](const std::string& text) {
    for (auto& t : tokenize(text)) out.push_back(std::move(t));
  };
  if (role == Role::conjecturer) {
    out.emplace_back("<lemma>");
    out.push_back(*lemma);
    out.emplace_back("<easy theorem>");
    append(seed_statement->text());
    out.emplace_back(":=");
    append(seed_proof->text());
    out.emplace_back("<hard theorem>");
  } else {
    out.emplace_back("<theorem>");
    append(target_statement->text());
    out.emplace_back("<proof>");
  }
  return out;
}

std::string PromptRecord::text() const {
  auto toks = tokens();
  return join_tokens(toks);
}

util::Json PromptRecord::to_json() const {
  util::Json j;
  j["role"] = role_name(role);
  j["lemma"] = lemma ? util::Json(*lemma) : util::Json(nullptr);
  j["seed_statement"] = seed_statement ? util::Json(seed_statement->text()) : util::Json(nullptr);
  j["seed_proof"] = seed_proof ? util::Json(seed_proof->text()) : util::Json(nullptr);
  j["target_statement"] =
      target_statement ? util::Json(target_statement->text()) : util::Json(nullptr);
  return j;
}

PromptRecord PromptRecord::from_json(const util::Json& j) {
  PromptRecord p;
  std::string role = j.at("role").get<std::string>();
  if (role == "conjecturer")
    p.role = Role::conjecturer;
  else if (role == "prover")
    p.role = Role::prover;
  else
    throw ConfigError("unknown prompt role: " + role);
  if (!j.at("lemma").is_null()) p.lemma = j.at("lemma").get<std::string>();
  if (!j.at("seed_statement").is_null())
    p.seed_statement = kernel::parse_statement(j.at("seed_statement").get<std::string>());
  if (!j.at("seed_proof").is_null())
    p.seed_proof = kernel::parse_proof(j.at("seed_proof").get<std::string>());
  if (!j.at("target_statement").is_null())
    p.target_statement = kernel::parse_statement(j.at("target_statement").get<std::string>());
  return p;
}

util::Json WeightedExample::to_json() const {
  util::Json j;
  j["prompt"] = prompt.to_json();
  j["completion"] = completion;
  j["weight"] = weight;
  return j;
}

WeightedExample WeightedExample::from_json(const util::Json& j) {
  WeightedExample ex;
  ex.prompt = PromptRecord::from_json(j.at("prompt"));
  ex.completion = j.at("completion").get<std::string>();
  ex.weight = j.at("weight").get<double>();
  return ex;
}

}  // namespace stp::policy
