#include "selfplay/state.hpp"

#include "util/error.hpp"

namespace stp::selfplay {

namespace {

util::Json stored_proof_json(const StoredProof& p) {
  util::Json j;
  j["proof"] = p.proof_text;
  j["length"] = p.length;
  j["cost"] = p.cost;
  return j;
}

StoredProof stored_proof_from(const util::Json& j) {
  return StoredProof{j.at("proof").get<std::string>(), j.at("length").get<int>(),
                     j.at("cost").get<long long>()};
}

AttemptKind kind_from(const std::string& name) {
  if (name == "dataset-statement") return AttemptKind::dataset_statement;
  if (name == "conjecture") return AttemptKind::conjecture;
  throw ConfigError("unknown attempt kind: " + name);
}

}  // namespace

util::Json RunState::to_json() const {
  util::Json j;
  j["iteration"] = iteration;
  j["cumulative_proofs"] = cumulative_proofs;

  util::Json proved_rows = util::Json::array();
  for (const auto& [text, entry] : proved) {
    util::Json row;
    row["statement"] = text;
    row["first_iteration"] = entry.first_iteration;
    util::Json proofs = util::Json::array();
    for (const auto& p : entry.proofs) proofs.push_back(stored_proof_json(p));
    row["proofs"] = proofs;
    proved_rows.push_back(row);
  }
  j["proved"] = proved_rows;

  util::Json history_rows = util::Json::array();
  for (const auto& h : history) {
    util::Json row;
    row["kind"] = attempt_kind_name(h.kind);
    row["target"] = h.target_text;
    row["proof"] = h.proof_text;
    row["length"] = h.length;
    row["cost"] = h.cost;
    row["pass_rate"] = h.pass_rate;
    row["iteration"] = h.iteration;
    history_rows.push_back(row);
  }
  j["history"] = history_rows;

  util::Json replay_rows = util::Json::array();
  for (const auto& slot : replay) {
    util::Json slot_rows = util::Json::array();
    for (const auto& ex : slot) slot_rows.push_back(ex.to_json());
    replay_rows.push_back(slot_rows);
  }
  j["replay"] = replay_rows;

  util::Json ei_rows = util::Json::array();
  for (const auto& [text, proofs] : ei_proofs) {
    util::Json row;
    row["statement"] = text;
    util::Json list = util::Json::array();
    for (const auto& p : proofs) list.push_back(stored_proof_json(p));
    row["proofs"] = list;
    ei_rows.push_back(row);
  }
  j["ei_proofs"] = ei_rows;

  return j;
}

RunState RunState::from_json(const util::Json& j) {
  RunState s;
  s.iteration = j.at("iteration").get<int>();
  s.cumulative_proofs = j.at("cumulative_proofs").get<long long>();

  for (const auto& row : j.at("proved")) {
    ProvedEntry entry;
    std::string text = row.at("statement").get<std::string>();
    entry.statement = kernel::parse_statement(text);
    entry.first_iteration = row.at("first_iteration").get<int>();
    for (const auto& p : row.at("proofs")) entry.proofs.push_back(stored_proof_from(p));
    s.proved.emplace(std::move(text), std::move(entry));
  }

  for (const auto& row : j.at("history")) {
    HistoryEntry h;
    h.kind = kind_from(row.at("kind").get<std::string>());
    h.target_text = row.at("target").get<std::string>();
    h.proof_text = row.at("proof").get<std::string>();
    h.length = row.at("length").get<int>();
    h.cost = row.at("cost").get<long long>();
    h.pass_rate = row.at("pass_rate").get<double>();
    h.iteration = row.at("iteration").get<int>();
    s.history_keys.insert(h.target_text + "\x1f" + h.proof_text);
    s.history.push_back(std::move(h));
  }

  for (const auto& slot_rows : j.at("replay")) {
    std::vector<policy::WeightedExample> slot;
    for (const auto& ex : slot_rows) slot.push_back(policy::WeightedExample::from_json(ex));
    s.replay.push_back(std::move(slot));
  }

  for (const auto& row : j.at("ei_proofs")) {
    std::vector<StoredProof> proofs;
    for (const auto& p : row.at("proofs")) proofs.push_back(stored_proof_from(p));
    s.ei_proofs.emplace(row.at("statement").get<std::string>(), std::move(proofs));
  }

  return s;
}

}  // namespace stp::selfplay
