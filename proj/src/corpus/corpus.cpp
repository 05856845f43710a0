#include "corpus/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include "kernel/verifier.hpp"
#include "util/error.hpp"
#include "util/jsonio.hpp"
#include "util/rng.hpp"

namespace stp::corpus {

using kernel::ApplyResult;
using kernel::ApplyStatus;
using kernel::BinOp;
using kernel::Direction;
using kernel::Path;
using kernel::Proof;
using kernel::ProofStep;
using kernel::RewriteRule;
using kernel::RuleLibrary;
using kernel::Side;
using kernel::Statement;
using kernel::Term;

std::vector<std::string> Corpus::file_ids() const {
  std::vector<std::string> ids;
  for (const auto& e : entries)
    if (ids.empty() || ids.back() != e.file_id) ids.push_back(e.file_id);
  return ids;
}

namespace {

Term random_leaf(util::Rng& rng, const GeneratorOptions& opt) {
  if (rng.uniform_real() < opt.leaf_var_prob)
    return Term::variable(static_cast<char>('a' + rng.index(static_cast<std::size_t>(opt.variables))));
  return Term::literal(rng.uniform_u64(static_cast<std::uint64_t>(opt.max_literal) + 1));
}

Term random_start_term(util::Rng& rng, const GeneratorOptions& opt) {
  auto child = [&]() {
    if (rng.uniform_real() < 0.6) return random_leaf(rng, opt);
    BinOp op = rng.bernoulli(0.5) ? BinOp::add : BinOp::mul;
    return Term::binary(op, random_leaf(rng, opt), random_leaf(rng, opt));
  };
  BinOp op = rng.bernoulli(0.5) ? BinOp::add : BinOp::mul;
  return Term::binary(op, child(), child());
}

void collect_paths(const Term& t, Path& current, std::vector<Path>& out) {
  out.push_back(current);
  if (!t.is_binary()) return;
  current.push_back(0);
  collect_paths(t.left(), current, out);
  current.back() = 1;
  collect_paths(t.right(), current, out);
  current.pop_back();
}

struct WalkResult {
  Statement statement;
  Proof proof;
};

// Each rule's preferred follow-ups; walks favor these chains at the root so
// the corpus carries recurring proof techniques rather than uniform noise.
const std::vector<std::string>& rule_successors(const std::string& rule) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"add_comm", {"add_assoc", "distrib_r"}},
      {"add_assoc", {"add_zero", "add_comm"}},
      {"add_zero", {"mul_one", "zero_add"}},
      {"zero_add", {"distrib_l", "add_assoc"}},
      {"mul_comm", {"mul_assoc", "distrib_l"}},
      {"mul_assoc", {"mul_one", "mul_comm"}},
      {"mul_one", {"add_zero", "one_mul"}},
      {"one_mul", {"distrib_r", "mul_assoc"}},
      {"distrib_l", {"add_comm", "mul_comm"}},
      {"distrib_r", {"add_assoc", "mul_assoc"}},
      {"mul_zero", {"zero_add", "add_zero"}},
      {"zero_mul", {"add_zero", "zero_add"}},
  };
  static const std::vector<std::string> empty;
  auto it = table.find(rule);
  return it == table.end() ? empty : it->second;
}

// One forward rewrite walk; nullopt when the walk stalls or loops back.
std::optional<WalkResult> try_walk(util::Rng& rng, const GeneratorOptions& opt,
                                   const RuleLibrary& library) {
  Term start = random_start_term(rng, opt);
  Term current = start;
  int k = opt.min_steps + static_cast<int>(rng.index(
                              static_cast<std::size_t>(opt.max_steps - opt.min_steps + 1)));
  std::vector<ProofStep> steps;
  std::string prev_rule;
  for (int s = 0; s < k; ++s) {
    bool motif = rng.uniform_real() < opt.motif_strength;

    std::vector<std::pair<const RewriteRule*, Path>> moves;
    if (motif && !prev_rule.empty()) {
      // preferred continuation: a successor rule applied at the root
      for (const std::string& name : rule_successors(prev_rule)) {
        const RewriteRule* rule = library.find(name);
        if (rule == nullptr) continue;
        ApplyResult r = apply_rule(current, *rule, {}, Direction::forward);
        if (r.status == ApplyStatus::ok && *r.term != current) moves.emplace_back(rule, Path{});
      }
    } else if (motif) {
      // chain openers stay at the root too
      for (const RewriteRule& rule : library.rules()) {
        if (rule.name == "trivial") continue;
        ApplyResult r = apply_rule(current, rule, {}, Direction::forward);
        if (r.status == ApplyStatus::ok && *r.term != current) moves.emplace_back(&rule, Path{});
      }
    }
    if (moves.empty()) {
      std::vector<Path> paths;
      Path tmp;
      collect_paths(current, tmp, paths);
      for (const RewriteRule& rule : library.rules()) {
        if (rule.name == "trivial") continue;
        for (const Path& p : paths) {
          ApplyResult r = apply_rule(current, rule, p, Direction::forward);
          if (r.status == ApplyStatus::ok && *r.term != current) moves.emplace_back(&rule, p);
        }
      }
    }
    if (moves.empty()) return std::nullopt;
    const auto& [rule, path] = moves[rng.index(moves.size())];
    current = *apply_rule(current, *rule, path, Direction::forward).term;
    steps.push_back(ProofStep::rw(Direction::forward, rule->name, Side::left, path));
    prev_rule = rule->name;
  }
  if (current == start) return std::nullopt;

  Statement statement{start, current};
  if (rng.bernoulli(opt.backward_proof_prob)) {
    // same chain replayed on the right side: undo the walk backward from the
    // end term until both sides read `start`. Rules that erase a
    // metavariable (mul_zero, zero_mul) cannot be inverted, so the reversed
    // form is kept only when it verifies.
    std::vector<ProofStep> reversed;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      reversed.push_back(ProofStep::rw(Direction::backward, it->rule_name, Side::right, it->path));
    reversed.push_back(ProofStep::refl());
    Proof candidate{std::move(reversed)};
    if (kernel::verify(statement, candidate, library).verified)
      return WalkResult{statement, std::move(candidate)};
  }
  steps.push_back(ProofStep::refl());
  return WalkResult{statement, Proof{std::move(steps)}};
}

}  // namespace

Corpus generate_seed_corpus(std::uint64_t seed, const GeneratorOptions& opt,
                            const RuleLibrary& library) {
  if (opt.min_steps < 1 || opt.min_steps > opt.max_steps || opt.max_steps > 8)
    throw ConfigError("generator steps must satisfy 1 <= min <= max <= 8");
  if (opt.files < 1 || opt.theorems_per_file < 1)
    throw ConfigError("generator needs at least one file and one theorem");
  if (opt.variables < 1 || opt.variables > 26) throw ConfigError("variable pool must be 1..26");

  Corpus corpus;
  std::unordered_set<std::string> seen;
  char name_buf[64];
  for (int f = 0; f < opt.files; ++f) {
    std::string file_id;
    std::snprintf(name_buf, sizeof(name_buf), "file_%03d", f);
    file_id = name_buf;
    for (int t = 0; t < opt.theorems_per_file; ++t) {
      std::optional<WalkResult> walk;
      for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
        util::Rng rng(util::derive_seed(seed, static_cast<std::uint64_t>(f),
                                        static_cast<std::uint64_t>(t), attempt));
        walk = try_walk(rng, opt, library);
        if (walk && !seen.count(walk->statement.text())) break;
        walk.reset();
      }
      if (!walk) throw ConfigError("corpus generation stalled; loosen the step range");
      if (!kernel::verify(walk->statement, walk->proof, library).verified)
        throw ConfigError("internal error: generated proof does not verify");
      seen.insert(walk->statement.text());
      std::snprintf(name_buf, sizeof(name_buf), "thm_%03d_%03d", f, t);
      corpus.entries.push_back(
          TheoremEntry{name_buf, walk->statement, walk->proof, file_id, t});
    }
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::string> files;
  for (const TheoremEntry& e : corpus.entries) {
    std::string& body = files[e.file_id];
    body += "theorem " + e.name + " : " + e.statement.text();
    if (e.proof) body += " := " + e.proof->text();
    body += "\n";
  }
  for (const auto& [file_id, body] : files) util::write_text_file(dir / (file_id + ".txt"), body);
}

Corpus load_corpus(const std::filesystem::path& dir, const kernel::TermLimits& limits) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a corpus directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Corpus corpus;
  for (const auto& file : files) {
    std::string file_id = file.stem().string();
    std::string content = util::read_text_file(file);
    std::size_t line_start = 0;
    int position = 0;
    std::size_t line_no = 0;
    while (line_start < content.size()) {
      std::size_t line_end = content.find('\n', line_start);
      if (line_end == std::string::npos) line_end = content.size();
      std::string line = content.substr(line_start, line_end - line_start);
      line_start = line_end + 1;
      ++line_no;
      if (line.empty()) continue;

      const std::string prefix = "theorem ";
      if (line.rfind(prefix, 0) != 0)
        throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected 'theorem'");
      std::size_t colon = line.find(" : ", prefix.size());
      if (colon == std::string::npos)
        throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected ' : '");
      std::string name = line.substr(prefix.size(), colon - prefix.size());
      std::size_t assign = line.find(" := ", colon);
      std::string stmt_text = assign == std::string::npos
                                  ? line.substr(colon + 3)
                                  : line.substr(colon + 3, assign - colon - 3);
      TheoremEntry entry;
      entry.name = std::move(name);
      entry.statement = kernel::parse_statement(stmt_text, limits);
      if (assign != std::string::npos)
        entry.proof = kernel::parse_proof(line.substr(assign + 4), limits);
      entry.file_id = file_id;
      entry.position = position++;
      corpus.entries.push_back(std::move(entry));
    }
  }
  return corpus;
}

std::vector<ProverSftExample> extract_prover_sft(const Corpus& corpus) {
  std::vector<ProverSftExample> out;
  for (const TheoremEntry& e : corpus.entries)
    if (e.proof) out.push_back(ProverSftExample{e.statement, *e.proof});
  return out;
}

std::vector<ConjecturerSftExample> extract_conjecturer_sft(const Corpus& corpus, int per_pair_cap,
                                                           std::uint64_t seed,
                                                           const RuleLibrary& library) {
  if (per_pair_cap < 1) throw ConfigError("per_pair_cap must be >= 1");

  // used-lemma sets come from the verifier
  std::vector<std::set<std::string>> used(corpus.entries.size());
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const TheoremEntry& e = corpus.entries[i];
    if (!e.proof) continue;
    auto outcome = kernel::verify(e.statement, *e.proof, library);
    if (outcome.verified) used[i] = std::move(outcome.used_lemmas);
  }

  std::vector<ConjecturerSftExample> out;
  std::size_t file_begin = 0;
  std::uint64_t file_index = 0;
  while (file_begin < corpus.entries.size()) {
    std::size_t file_end = file_begin;
    while (file_end < corpus.entries.size() &&
           corpus.entries[file_end].file_id == corpus.entries[file_begin].file_id)
      ++file_end;

    // lemma -> tuples in (i, j) enumeration order
    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> groups;
    for (std::size_t i = file_begin; i < file_end; ++i) {
      if (!corpus.entries[i].proof) continue;
      for (std::size_t j = i + 1; j < file_end; ++j) {
        if (!corpus.entries[j].proof) continue;
        for (const std::string& lemma : used[i])
          if (used[j].count(lemma)) groups[lemma].emplace_back(i, j);
      }
    }
    for (const auto& [lemma, tuples] : groups) {
      std::vector<std::size_t> keep;
      if (tuples.size() <= static_cast<std::size_t>(per_pair_cap)) {
        for (std::size_t k = 0; k < tuples.size(); ++k) keep.push_back(k);
      } else {
        util::Rng rng(util::derive_seed(seed, file_index, util::fnv1a64(lemma)));
        keep = rng.subset(tuples.size(), static_cast<std::size_t>(per_pair_cap));
      }
      for (std::size_t k : keep)
        out.push_back(ConjecturerSftExample{lemma, corpus.entries[tuples[k].first],
                                            corpus.entries[tuples[k].second]});
    }
    file_begin = file_end;
    ++file_index;
  }
  return out;
}

std::vector<TaggedStatement> load_unproved_dataset(const std::filesystem::path& file,
                                                   const std::string& source_tag,
                                                   const kernel::TermLimits& limits) {
  std::string content = util::read_text_file(file);
  std::vector<TaggedStatement> out;
  std::unordered_set<std::string> seen;
  std::size_t line_start = 0;
  std::size_t line_no = 0;
  while (line_start < content.size()) {
    std::size_t line_end = content.find('\n', line_start);
    if (line_end == std::string::npos) line_end = content.size();
    std::string line = content.substr(line_start, line_end - line_start);
    line_start = line_end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    kernel::Statement stmt;
    try {
      stmt = kernel::parse_statement(line, limits);
    } catch (const ParseError& e) {
      throw ParseError(e.position(), e.expected() + " (line " + std::to_string(line_no) + ")");
    }
    if (seen.insert(stmt.text()).second) out.push_back(TaggedStatement{stmt, source_tag});
  }
  return out;
}

void save_statements(const std::vector<kernel::Statement>& statements,
                     const std::filesystem::path& file) {
  std::string body;
  for (const kernel::Statement& s : statements) {
    body += s.text();
    body += "\n";
  }
  util::write_text_file(file, body);
}

}  // namespace stp::corpus
