#pragma once

#include <cstdint>
#include <vector>

#include "kernel/term.hpp"

namespace stp::policy {

inline constexpr std::size_t kEmbeddingDim = 256;

// Statement embedding: token counts folded into 256 components (component =
// stable token index mod 256), L2-normalized. The all-zero vector stands for
// the empty statement. Stateless: the token index is a hash of the token text,
// so embeddings do not depend on any model snapshot.
using EmbeddingVector = std::vector<double>;

std::uint32_t stable_token_index(std::string_view token);

EmbeddingVector embed(const kernel::Statement& statement);

// Cosine similarity; zero vectors have similarity 0. The re-weighting cost is
// d(x, y) = -cosine(x, y).
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace stp::policy
