#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace stp::kernel {

enum class BinOp { add, mul };

inline char op_char(BinOp op) { return op == BinOp::add ? '+' : '*'; }

// Limits enforced by the parsers. Depth counts binary nodes along the deepest
// path (a leaf has depth 0).
struct TermLimits {
  int max_term_depth = 16;
  std::uint64_t max_literal = 1000000;
};

// Immutable term over variables a-z, natural literals and binary +/* nodes.
// Metavariables (X, Y, Z) appear only inside rewrite-rule patterns.
// Subtrees are shared; copying a Term is cheap.
class Term {
 public:
  enum class Kind { variable, literal, binary, metavar };

  // Defaults to the literal 0 so aggregates holding terms stay regular.
  Term();

  static Term variable(char name);
  static Term literal(std::uint64_t value);
  static Term binary(BinOp op, Term left, Term right);
  static Term metavar(char name);

  Kind kind() const { return node_->kind; }
  bool is_binary() const { return node_->kind == Kind::binary; }
  bool is_leaf() const { return node_->kind != Kind::binary; }

  char var_name() const { return node_->name; }
  char meta_name() const { return node_->name; }
  std::uint64_t literal_value() const { return node_->value; }
  BinOp op() const { return node_->op; }
  Term left() const { return Term(node_->left); }
  Term right() const { return Term(node_->right); }

  // Number of binary nodes on the deepest root-to-leaf path.
  int depth() const { return node_->depth; }

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

  // Canonical serialization: fully parenthesized binary nodes, single spaces,
  // "*" for multiplication.
  std::string text() const;

 private:
  struct Node {
    Kind kind;
    char name = 0;             // variable / metavar
    std::uint64_t value = 0;   // literal
    BinOp op = BinOp::add;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    int depth = 0;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static bool node_equal(const Node& a, const Node& b);
  static void node_text(const Node& n, std::string& out);

  std::shared_ptr<const Node> node_;
};

// An equation between two terms. Equality is canonical-text equality.
struct Statement {
  Term lhs;
  Term rhs;

  std::string text() const { return lhs.text() + " = " + rhs.text(); }
  bool operator==(const Statement& other) const { return lhs == other.lhs && rhs == other.rhs; }
  bool operator!=(const Statement& other) const { return !(*this == other); }
};

// Parses the canonical grammar. Accepts arbitrary whitespace between tokens;
// re-serialization is canonical. Throws ParseError / LimitError.
Term parse_term(std::string_view text, const TermLimits& limits = {});
Statement parse_statement(std::string_view text, const TermLimits& limits = {});

// Same grammar but upper-case X, Y, Z parse as metavariables (rule files).
Term parse_pattern(std::string_view text, const TermLimits& limits = {});

}  // namespace stp::kernel
