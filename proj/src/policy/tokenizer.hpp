#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stp::policy {

inline constexpr const char* kEndToken = "<end>";
inline constexpr const char* kUnkToken = "<unk>";

// Formatting tokens are single tokens even though some contain spaces.
inline constexpr const char* kFormattingTokens[] = {
    "<lemma>", "<easy theorem>", "<hard theorem>", "</hard theorem>",
    "<theorem>", "<proof>", "<end>", "<unk>",
};

// Splits text on the grammar's lexical classes: formatting tokens, "<-", ":=",
// punctuation, identifiers, and whole literals. Unknown characters become
// "<unk>". Lossless for canonical text: join_tokens(tokenize(s)) == s.
std::vector<std::string> tokenize(std::string_view text);

// Canonical spacing: single spaces between tokens except after "(" / "[" and
// before ")" / "]" / "," / ";".
std::string join_tokens(std::span<const std::string> tokens);

}  // namespace stp::policy
