#include "kernel/term.hpp"

#include <algorithm>

#include "util/error.hpp"

namespace stp::kernel {

Term::Term() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::literal;
    n->value = 0;
    return n;
  }();
  node_ = zero;
}

Term Term::variable(char name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->name = name;
  return Term(std::move(n));
}

Term Term::literal(std::uint64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::literal;
  n->value = value;
  return Term(std::move(n));
}

Term Term::binary(BinOp op, Term left, Term right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::binary;
  n->op = op;
  n->depth = 1 + std::max(left.depth(), right.depth());
  n->left = left.node_;
  n->right = right.node_;
  return Term(std::move(n));
}

Term Term::metavar(char name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::metavar;
  n->name = name;
  return Term(std::move(n));
}

bool Term::node_equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::variable:
    case Kind::metavar:
      return a.name == b.name;
    case Kind::literal:
      return a.value == b.value;
    case Kind::binary:
      return a.op == b.op && node_equal(*a.left, *b.left) && node_equal(*a.right, *b.right);
  }
  return false;
}

bool Term::operator==(const Term& other) const { return node_equal(*node_, *other.node_); }

void Term::node_text(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::variable:
    case Kind::metavar:
      out.push_back(n.name);
      break;
    case Kind::literal:
      out += std::to_string(n.value);
      break;
    case Kind::binary:
      out.push_back('(');
      node_text(*n.left, out);
      out.push_back(' ');
      out.push_back(op_char(n.op));
      out.push_back(' ');
      node_text(*n.right, out);
      out.push_back(')');
      break;
  }
}

std::string Term::text() const {
  std::string out;
  node_text(*node_, out);
  return out;
}

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, const TermLimits& limits, bool allow_meta)
      : text_(text), limits_(limits), allow_meta_(allow_meta) {}

  Term parse_full_term() {
    Term t = parse_term(0);
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of input");
    return t;
  }

  Statement parse_full_statement() {
    Term lhs = parse_term(0);
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '=') throw ParseError(pos_, "'='");
    ++pos_;
    Term rhs = parse_term(0);
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of input");
    return Statement{std::move(lhs), std::move(rhs)};
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  Term parse_term(int depth) {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "term");
    char c = text_[pos_];
    if (c == '(') {
      if (depth + 1 > limits_.max_term_depth)
        throw LimitError("term depth exceeds " + std::to_string(limits_.max_term_depth));
      ++pos_;
      Term left = parse_term(depth + 1);
      skip_space();
      if (pos_ >= text_.size() || (text_[pos_] != '+' && text_[pos_] != '*'))
        throw ParseError(pos_, "'+' or '*'");
      BinOp op = text_[pos_] == '+' ? BinOp::add : BinOp::mul;
      ++pos_;
      Term right = parse_term(depth + 1);
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError(pos_, "')'");
      ++pos_;
      return Term::binary(op, std::move(left), std::move(right));
    }
    if (c >= 'a' && c <= 'z') {
      // Single-letter variables only: a following identifier char is an error.
      if (pos_ + 1 < text_.size() && is_ident_char(text_[pos_ + 1]))
        throw ParseError(pos_, "single-letter variable");
      ++pos_;
      return Term::variable(c);
    }
    if (allow_meta_ && (c == 'X' || c == 'Y' || c == 'Z')) {
      ++pos_;
      return Term::metavar(c);
    }
    if (c >= '0' && c <= '9') {
      std::size_t start = pos_;
      std::uint64_t value = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        std::uint64_t digit = static_cast<std::uint64_t>(text_[pos_] - '0');
        if (value > (UINT64_MAX - digit) / 10)
          throw LimitError("literal at offset " + std::to_string(start) + " overflows");
        value = value * 10 + digit;
        ++pos_;
      }
      if (value > limits_.max_literal)
        throw LimitError("literal " + std::to_string(value) + " exceeds " +
                         std::to_string(limits_.max_literal));
      return Term::literal(value);
    }
    throw ParseError(pos_, "term");
  }

  static bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }

  std::string_view text_;
  const TermLimits& limits_;
  bool allow_meta_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text, const TermLimits& limits) {
  return TermParser(text, limits, false).parse_full_term();
}

Statement parse_statement(std::string_view text, const TermLimits& limits) {
  return TermParser(text, limits, false).parse_full_statement();
}

Term parse_pattern(std::string_view text, const TermLimits& limits) {
  return TermParser(text, limits, true).parse_full_term();
}

}  // namespace stp::kernel
