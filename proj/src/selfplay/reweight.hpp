#pragma once

#include <string>
#include <vector>

#include "policy/embedding.hpp"

namespace stp::selfplay {

// Inputs for the optimal-transport re-weighting of surviving conjectures
// toward the unproved-statement distribution. Matching cost is
// d(x, y) = -cosine(embedding x, embedding y).
struct ReweightProblem {
  std::vector<policy::EmbeddingVector> conjectures;           // x_1..x_n, index order fixed
  std::vector<policy::EmbeddingVector> statement_embeddings;  // y_1..y_m
  std::vector<std::string> statement_keys;                    // canonical texts; loop order
  std::vector<int> matching_weights;                          // k_y >= 1 per statement
  double cap = 3.0;  // mask threshold on P(x) * n; infinity disables masking
};

struct ReweightSelection {
  std::size_t statement;    // index into the problem's statement arrays
  std::size_t conjecture;   // selected conjecture index
};

struct ReweightResult {
  std::vector<double> weights;              // w_i = P(x_i) * n
  std::vector<ReweightSelection> trace;     // selections in execution order
  std::vector<int> masked_at;               // trace position after which x_i was masked, -1 if never
};

// Greedy per-statement assignment: statements are visited in ascending
// canonical-text order; each claims its k_y unmasked nearest conjectures
// (ties by ascending conjecture index) and adds 1/m to each of their masses.
// A conjecture whose running mass satisfies P(x) * n > cap is excluded from
// all later selections. Exact integer mass accounting guarantees
// sum(w) = n * (sum k_y) / m. Throws InfeasibleError when a statement cannot
// fill its k_y selections.
ReweightResult wasserstein_reweight(const ReweightProblem& problem);

}  // namespace stp::selfplay
