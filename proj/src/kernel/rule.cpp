#include "kernel/rule.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "util/error.hpp"

namespace stp::kernel {

namespace {

void collect_metavars(const Term& t, std::set<char>& out) {
  if (t.kind() == Term::Kind::metavar) {
    out.insert(t.meta_name());
  } else if (t.is_binary()) {
    collect_metavars(t.left(), out);
    collect_metavars(t.right(), out);
  }
}

void validate_rule(const RewriteRule& rule) {
  std::set<char> in_pattern, in_replacement;
  collect_metavars(rule.pattern, in_pattern);
  collect_metavars(rule.replacement, in_replacement);
  for (char m : in_replacement) {
    if (!in_pattern.count(m))
      throw ConfigError("rule '" + rule.name + "': metavariable " + std::string(1, m) +
                        " appears only in the replacement");
  }
  if (rule.name == "trivial") {
    if (rule.pattern.kind() != Term::Kind::metavar ||
        rule.replacement.kind() != Term::Kind::metavar ||
        rule.pattern.meta_name() != rule.replacement.meta_name())
      throw ConfigError("the 'trivial' rule must map a metavariable to itself");
  }
}

}  // namespace

void RuleLibrary::add(RewriteRule rule) {
  validate_rule(rule);
  auto pos = std::lower_bound(rules_.begin(), rules_.end(), rule.name,
                              [](const RewriteRule& r, const std::string& n) { return r.name < n; });
  if (pos != rules_.end() && pos->name == rule.name)
    throw ConfigError("duplicate rule name '" + rule.name + "'");
  rules_.insert(pos, std::move(rule));
}

const RewriteRule* RuleLibrary::find(const std::string& name) const {
  auto pos = std::lower_bound(rules_.begin(), rules_.end(), name,
                              [](const RewriteRule& r, const std::string& n) { return r.name < n; });
  if (pos != rules_.end() && pos->name == name) return &*pos;
  return nullptr;
}

RuleLibrary RuleLibrary::builtin() {
  struct Spec {
    const char* name;
    const char* pattern;
    const char* replacement;
  };
  static constexpr std::array<Spec, 13> specs{{
      {"add_comm", "(X + Y)", "(Y + X)"},
      {"add_assoc", "((X + Y) + Z)", "(X + (Y + Z))"},
      {"mul_comm", "(X * Y)", "(Y * X)"},
      {"mul_assoc", "((X * Y) * Z)", "(X * (Y * Z))"},
      {"distrib_l", "(X * (Y + Z))", "((X * Y) + (X * Z))"},
      {"distrib_r", "((X + Y) * Z)", "((X * Z) + (Y * Z))"},
      {"add_zero", "(X + 0)", "X"},
      {"zero_add", "(0 + X)", "X"},
      {"mul_one", "(X * 1)", "X"},
      {"one_mul", "(1 * X)", "X"},
      {"mul_zero", "(X * 0)", "0"},
      {"zero_mul", "(0 * X)", "0"},
      {"trivial", "X", "X"},
  }};
  RuleLibrary lib;
  for (const auto& s : specs)
    lib.add(RewriteRule{s.name, parse_pattern(s.pattern), parse_pattern(s.replacement)});
  return lib;
}

RuleLibrary RuleLibrary::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open rule file: " + file.string());
  RuleLibrary lib;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto colon = line.find(':');
    auto arrow = line.find("->");
    if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
      throw ConfigError(file.string() + ":" + std::to_string(line_no) +
                        ": expected 'name: pattern -> replacement'");
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty())
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": empty rule name");
    try {
      Term pattern = parse_pattern(line.substr(colon + 1, arrow - colon - 1));
      Term replacement = parse_pattern(line.substr(arrow + 2));
      lib.add(RewriteRule{std::move(name), std::move(pattern), std::move(replacement)});
    } catch (const ParseError& e) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lib;
}

std::string RuleLibrary::to_text() const {
  std::string out;
  for (const auto& r : rules_) {
    out += r.name;
    out += ": ";
    out += r.pattern.text();
    out += " -> ";
    out += r.replacement.text();
    out += "\n";
  }
  return out;
}

std::string path_text(const Path& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(path[i]);
  }
  out += "]";
  return out;
}

namespace {

// One node-level comparison between a pattern node and a term node is the
// primitive unit of the deterministic cost meter.
bool match_nodes(const Term& pattern, const Term& term,
                 std::array<std::optional<Term>, 3>& bindings, long long& cost) {
  ++cost;
  switch (pattern.kind()) {
    case Term::Kind::metavar: {
      int slot = pattern.meta_name() - 'X';
      if (!bindings[slot]) {
        bindings[slot] = term;
        return true;
      }
      return *bindings[slot] == term;
    }
    case Term::Kind::variable:
      return term.kind() == Term::Kind::variable && term.var_name() == pattern.var_name();
    case Term::Kind::literal:
      return term.kind() == Term::Kind::literal && term.literal_value() == pattern.literal_value();
    case Term::Kind::binary:
      return term.is_binary() && term.op() == pattern.op() &&
             match_nodes(pattern.left(), term.left(), bindings, cost) &&
             match_nodes(pattern.right(), term.right(), bindings, cost);
  }
  return false;
}

// Instantiates a pattern under the bindings. Returns nullopt when the pattern
// contains an unbound metavariable.
std::optional<Term> substitute(const Term& t, const std::array<std::optional<Term>, 3>& bindings) {
  switch (t.kind()) {
    case Term::Kind::metavar: {
      int slot = t.meta_name() - 'X';
      if (!bindings[slot]) return std::nullopt;
      return bindings[slot];
    }
    case Term::Kind::variable:
    case Term::Kind::literal:
      return t;
    case Term::Kind::binary: {
      auto l = substitute(t.left(), bindings);
      if (!l) return std::nullopt;
      auto r = substitute(t.right(), bindings);
      if (!r) return std::nullopt;
      return Term::binary(t.op(), std::move(*l), std::move(*r));
    }
  }
  return std::nullopt;
}

std::optional<Term> rebuild(const Term& t, const Path& path, std::size_t at, const Term& repl) {
  if (at == path.size()) return repl;
  if (!t.is_binary()) return std::nullopt;
  if (path[at] == 0) {
    auto l = rebuild(t.left(), path, at + 1, repl);
    if (!l) return std::nullopt;
    return Term::binary(t.op(), std::move(*l), t.right());
  }
  auto r = rebuild(t.right(), path, at + 1, repl);
  if (!r) return std::nullopt;
  return Term::binary(t.op(), t.left(), std::move(*r));
}

}  // namespace

ApplyResult apply_rule(const Term& term, const RewriteRule& rule, const Path& path,
                       Direction direction) {
  ApplyResult result{ApplyStatus::ok, std::nullopt, 0};

  Term sub = term;
  for (int step : path) {
    if (!sub.is_binary() || (step != 0 && step != 1)) {
      result.status = ApplyStatus::path_error;
      return result;
    }
    sub = step == 0 ? sub.left() : sub.right();
  }

  const Term& from = direction == Direction::forward ? rule.pattern : rule.replacement;
  const Term& to = direction == Direction::forward ? rule.replacement : rule.pattern;

  std::array<std::optional<Term>, 3> bindings;
  if (!match_nodes(from, sub, bindings, result.match_cost)) {
    result.status = ApplyStatus::no_match;
    return result;
  }
  auto instantiated = substitute(to, bindings);
  if (!instantiated) {
    result.status = ApplyStatus::no_match;
    return result;
  }
  result.term = rebuild(term, path, 0, *instantiated);
  if (!result.term) {
    result.status = ApplyStatus::path_error;
    result.term.reset();
  }
  return result;
}

}  // namespace stp::kernel
