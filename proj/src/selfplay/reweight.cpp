#include "selfplay/reweight.hpp"

#include <algorithm>
#include <numeric>

#include "util/error.hpp"

namespace stp::selfplay {

ReweightResult wasserstein_reweight(const ReweightProblem& problem) {
  const std::size_t n = problem.conjectures.size();
  const std::size_t m = problem.statement_embeddings.size();
  if (n == 0 || m == 0) throw InfeasibleError("re-weighting needs at least one point on each side");
  if (problem.statement_keys.size() != m || problem.matching_weights.size() != m)
    throw ConfigError("re-weighting problem arrays disagree on m");
  for (int k : problem.matching_weights)
    if (k < 1) throw ConfigError("matching weights must be at least 1");

  // visit statements in ascending canonical-text order, ties by index
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return problem.statement_keys[a] < problem.statement_keys[b];
  });

  // integer selection counts keep the mass identity exact
  std::vector<long long> count(n, 0);
  std::vector<bool> masked(n, false);
  ReweightResult result;
  result.masked_at.assign(n, -1);

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(n);
  for (std::size_t yi : order) {
    const auto& y = problem.statement_embeddings[yi];
    const std::size_t k = static_cast<std::size_t>(problem.matching_weights[yi]);

    scored.clear();
    for (std::size_t xi = 0; xi < n; ++xi) {
      if (masked[xi]) continue;
      scored.emplace_back(-policy::cosine(problem.conjectures[xi], y), xi);
    }
    if (scored.size() < k)
      throw InfeasibleError("statement '" + problem.statement_keys[yi] + "' needs " +
                            std::to_string(k) + " matches but only " +
                            std::to_string(scored.size()) + " conjectures remain unmasked");
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end());

    for (std::size_t i = 0; i < k; ++i) {
      std::size_t xi = scored[i].second;
      ++count[xi];
      result.trace.push_back(ReweightSelection{yi, xi});
      if (static_cast<double>(count[xi]) / md * nd > problem.cap) {
        masked[xi] = true;
        result.masked_at[xi] = static_cast<int>(result.trace.size()) - 1;
      }
    }
  }

  result.weights.resize(n);
  for (std::size_t xi = 0; xi < n; ++xi)
    result.weights[xi] = static_cast<double>(count[xi]) * nd / md;
  return result;
}

}  // namespace stp::selfplay
