#include "kernel/proof.hpp"

#include "util/error.hpp"

namespace stp::kernel {

std::string ProofStep::text() const {
  switch (kind) {
    case Kind::refl:
      return "refl";
    case Kind::eval:
      return "eval";
    case Kind::rewrite: {
      std::string out = "rw ";
      if (direction == Direction::backward) out += "<- ";
      out += rule_name;
      out += " at ";
      out.push_back(side_char(side));
      out.push_back(' ');
      out += path_text(path);
      return out;
    }
  }
  return {};
}

bool ProofStep::operator==(const ProofStep& other) const {
  if (kind != other.kind) return false;
  if (kind != Kind::rewrite) return true;
  return direction == other.direction && rule_name == other.rule_name && side == other.side &&
         path == other.path;
}

std::string Proof::text() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out += "; ";
    out += steps[i].text();
  }
  return out;
}

namespace {

class ProofParser {
 public:
  ProofParser(std::string_view text, const TermLimits& limits) : text_(text), limits_(limits) {}

  Proof parse() {
    Proof proof;
    skip_space();
    if (pos_ >= text_.size()) throw StructureError("empty proof");
    proof.steps.push_back(parse_step());
    skip_space();
    while (pos_ < text_.size()) {
      if (text_[pos_] != ';') throw ParseError(pos_, "';' or end of proof");
      ++pos_;
      proof.steps.push_back(parse_step());
      skip_space();
    }
    for (std::size_t i = 0; i + 1 < proof.steps.size(); ++i) {
      if (proof.steps[i].kind != ProofStep::Kind::rewrite)
        throw StructureError("step " + std::to_string(i) + " closes before the final step");
    }
    if (proof.steps.back().kind == ProofStep::Kind::rewrite)
      throw StructureError("final step must be refl or eval");
    return proof;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  std::string read_word() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }

  ProofStep parse_step() {
    skip_space();
    std::size_t start = pos_;
    std::string word = read_word();
    if (word == "refl") return ProofStep::refl();
    if (word == "eval") return ProofStep::eval();
    if (word != "rw") throw ParseError(start, "'rw', 'refl' or 'eval'");

    Direction dir = Direction::forward;
    skip_space();
    if (pos_ + 1 < text_.size() && text_[pos_] == '<' && text_[pos_ + 1] == '-') {
      dir = Direction::backward;
      pos_ += 2;
    }

    skip_space();
    std::size_t name_start = pos_;
    std::string name = read_word();
    if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z'))
      throw ParseError(name_start, "rule name");

    skip_space();
    std::size_t at_start = pos_;
    if (read_word() != "at") throw ParseError(at_start, "'at'");

    skip_space();
    if (pos_ >= text_.size() || (text_[pos_] != 'L' && text_[pos_] != 'R'))
      throw ParseError(pos_, "'L' or 'R'");
    Side side = text_[pos_] == 'L' ? Side::left : Side::right;
    ++pos_;

    Path path = parse_path();
    return ProofStep::rw(dir, std::move(name), side, std::move(path));
  }

  Path parse_path() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '[') throw ParseError(pos_, "'['");
    std::size_t open = pos_;
    ++pos_;
    Path path;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return path;
    }
    while (true) {
      skip_space();
      if (pos_ >= text_.size() || (text_[pos_] != '0' && text_[pos_] != '1'))
        throw ParseError(pos_, "path index 0 or 1");
      path.push_back(text_[pos_] - '0');
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        break;
      }
      throw ParseError(pos_, "',' or ']'");
    }
    if (static_cast<int>(path.size()) > limits_.max_term_depth)
      throw LimitError("path at offset " + std::to_string(open) + " exceeds depth " +
                       std::to_string(limits_.max_term_depth));
    return path;
  }

  std::string_view text_;
  const TermLimits& limits_;
  std::size_t pos_ = 0;
};

}  // namespace

Proof parse_proof(std::string_view text, const TermLimits& limits) {
  return ProofParser(text, limits).parse();
}

}  // namespace stp::kernel
