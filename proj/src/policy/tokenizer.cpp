#include "policy/tokenizer.hpp"

namespace stp::policy {

namespace {

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
      continue;
    }
    if (c == '<') {
      bool matched = false;
      for (const char* ft : kFormattingTokens) {
        std::string_view f(ft);
        if (text.substr(pos, f.size()) == f) {
          tokens.emplace_back(f);
          pos += f.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (pos + 1 < text.size() && text[pos + 1] == '-') {
        tokens.emplace_back("<-");
        pos += 2;
        continue;
      }
      tokens.emplace_back(kUnkToken);
      ++pos;
      continue;
    }
    if (c == ':' && pos + 1 < text.size() && text[pos + 1] == '=') {
      tokens.emplace_back(":=");
      pos += 2;
      continue;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' || c == ';' || c == '+' ||
        c == '*' || c == '=') {
      tokens.emplace_back(1, c);
      ++pos;
      continue;
    }
    if (is_digit(c)) {
      std::size_t start = pos;
      while (pos < text.size() && is_digit(text[pos])) ++pos;
      tokens.emplace_back(text.substr(start, pos - start));
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t start = pos;
      while (pos < text.size() && is_ident_char(text[pos])) ++pos;
      tokens.emplace_back(text.substr(start, pos - start));
      continue;
    }
    tokens.emplace_back(kUnkToken);
    ++pos;
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      const std::string& prev = tokens[i - 1];
      const std::string& cur = tokens[i];
      bool no_space = prev == "(" || prev == "[" || cur == ")" || cur == "]" || cur == "," ||
                      cur == ";";
      if (!no_space) out.push_back(' ');
    }
    out += tokens[i];
  }
  return out;
}

}  // namespace stp::policy
