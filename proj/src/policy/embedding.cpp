#include "policy/embedding.hpp"

#include <cmath>

#include "policy/tokenizer.hpp"
#include "util/jsonio.hpp"

namespace stp::policy {

std::uint32_t stable_token_index(std::string_view token) {
  return static_cast<std::uint32_t>(util::fnv1a64(token) % kEmbeddingDim);
}

EmbeddingVector embed(const kernel::Statement& statement) {
  EmbeddingVector v(kEmbeddingDim, 0.0);
  for (const std::string& token : tokenize(statement.text())) v[stable_token_index(token)] += 1.0;
  double norm_sq = 0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq > 0) {
    double norm = std::sqrt(norm_sq);
    for (double& x : v) x /= norm;
  }
  return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0, na = 0, nb = 0;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  for (std::size_t i = n; i < a.size(); ++i) na += a[i] * a[i];
  for (std::size_t i = n; i < b.size(); ++i) nb += b[i] * b[i];
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace stp::policy
