#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "selfplay/reweight.hpp"
#include "support/ot_oracle.hpp"
#include "util/error.hpp"
#include "util/rng.hpp"

using namespace stp;
using namespace stp::selfplay;

namespace {

policy::EmbeddingVector vec(std::initializer_list<double> values) {
  policy::EmbeddingVector v(values);
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (double& x : v) x /= norm;
  return v;
}

ReweightProblem random_problem(util::Rng& rng, std::size_t max_n, std::size_t max_m, double cap) {
  ReweightProblem p;
  std::size_t n = 1 + rng.index(max_n);
  std::size_t m = 1 + rng.index(max_m);
  std::size_t dim = 2 + rng.index(4);
  auto random_vec = [&]() {
    policy::EmbeddingVector v(dim);
    for (double& x : v) x = rng.uniform_real() * 2.0 - 1.0;
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) p.conjectures.push_back(random_vec());
  std::size_t max_k = std::min<std::size_t>(3, n);  // k_y matches must fit in n conjectures
  for (std::size_t j = 0; j < m; ++j) {
    p.statement_embeddings.push_back(random_vec());
    p.statement_keys.push_back("stmt_" + std::to_string(j));
    p.matching_weights.push_back(1 + static_cast<int>(rng.index(max_k)));
  }
  p.cap = cap;
  return p;
}

double mass_target(const ReweightProblem& p) {
  long long total_k = 0;
  for (int k : p.matching_weights) total_k += k;
  return static_cast<double>(p.conjectures.size()) * static_cast<double>(total_k) /
         static_cast<double>(p.statement_embeddings.size());
}

}  // namespace

TEST_CASE("single conjecture receives all mass") {
  ReweightProblem p;
  p.conjectures = {vec({1, 0})};
  p.statement_embeddings = {vec({1, 0}), vec({0, 1})};
  p.statement_keys = {"a", "b"};
  p.matching_weights = {1, 1};
  p.cap = std::numeric_limits<double>::infinity();
  auto result = wasserstein_reweight(p);
  REQUIRE(result.weights.size() == 1);
  CHECK(result.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("argmin assignment example") {
  // e1=(1,0), e2=(0,1); statements at (1,0), (1,0), (0,1), all k=1
  ReweightProblem p;
  p.conjectures = {vec({1, 0}), vec({0, 1})};
  p.statement_embeddings = {vec({1, 0}), vec({1, 0}), vec({0, 1})};
  p.statement_keys = {"s1", "s2", "s3"};
  p.matching_weights = {1, 1, 1};
  p.cap = std::numeric_limits<double>::infinity();
  auto result = wasserstein_reweight(p);
  // P = [2/3, 1/3], weights = P * n = [4/3, 2/3]
  CHECK(result.weights[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(result.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("ties break by ascending conjecture index") {
  ReweightProblem p;
  p.conjectures = {vec({1, 0}), vec({1, 0}), vec({1, 0})};
  p.statement_embeddings = {vec({1, 0})};
  p.statement_keys = {"s"};
  p.matching_weights = {2};
  p.cap = std::numeric_limits<double>::infinity();
  auto result = wasserstein_reweight(p);
  CHECK(result.weights[0] == doctest::Approx(3.0 * 2.0 / 1.0 / 2.0));  // got one pick: 1*3/1
  CHECK(result.weights[0] == doctest::Approx(3.0));
  CHECK(result.weights[1] == doctest::Approx(3.0));
  CHECK(result.weights[2] == 0.0);
}

TEST_CASE("mask excludes capped conjectures from later selections") {
  // one dominant conjecture, cap forces spillover
  ReweightProblem p;
  p.conjectures = {vec({1, 0}), vec({0.9, 0.1})};
  for (int j = 0; j < 4; ++j) {
    p.statement_embeddings.push_back(vec({1, 0}));
    p.statement_keys.push_back("s" + std::to_string(j));
    p.matching_weights.push_back(1);
  }
  p.cap = 1.0;  // P(x) * n > 1 masks; first selection gives x0 mass 1/4 * 2 = 0.5; second 1.0; third masks
  auto result = wasserstein_reweight(p);
  // selections: s0 -> x0 (P*n = 0.5), s1 -> x0 (1.0), s2 -> x0 (1.5 > 1, masked), s3 -> x1
  CHECK(result.weights[0] == doctest::Approx(1.5));
  CHECK(result.weights[1] == doctest::Approx(0.5));
  // trace audit: after the mask position, x0 receives nothing
  REQUIRE(result.masked_at[0] >= 0);
  for (std::size_t t = static_cast<std::size_t>(result.masked_at[0]) + 1; t < result.trace.size(); ++t)
    CHECK(result.trace[t].conjecture != 0);
  // mass identity holds on capped instances
  double sum = result.weights[0] + result.weights[1];
  CHECK(sum == doctest::Approx(mass_target(p)).epsilon(1e-12));
}

TEST_CASE("infeasible when every conjecture is masked") {
  ReweightProblem p;
  p.conjectures = {vec({1, 0})};
  for (int j = 0; j < 8; ++j) {
    p.statement_embeddings.push_back(vec({1, 0}));
    p.statement_keys.push_back("s" + std::to_string(j));
    p.matching_weights.push_back(1);
  }
  p.cap = 2.0;  // single conjecture picks up mass 1/8 each; P*n = count/8 > 2 after 17 picks... n=1
  // with n=1, P(x)*n = count/8; cap 2 masks after count 17 — unreachable; tighten:
  p.cap = 0.25;  // masks after count 3 (3/8 > 0.25)
  CHECK_THROWS_AS(wasserstein_reweight(p), InfeasibleError);
}

TEST_CASE("statement iteration follows ascending canonical text") {
  // two statements whose keys order them opposite to their array order;
  // cap = tiny so the first visited statement masks its pick
  ReweightProblem p;
  p.conjectures = {vec({1, 0}), vec({0, 1})};
  p.statement_embeddings = {vec({0, 1}), vec({1, 0})};
  p.statement_keys = {"zz", "aa"};  // "aa" visited first
  p.matching_weights = {1, 1};
  p.cap = 0.5;
  auto result = wasserstein_reweight(p);
  REQUIRE(result.trace.size() == 2);
  CHECK(result.trace[0].statement == 1);  // "aa"
  CHECK(result.trace[1].statement == 0);
}

TEST_CASE("greedy equals the exhaustive OT oracle with cap disabled") {
  util::Rng rng(321);
  for (int trial = 0; trial < 100; ++trial) {
    ReweightProblem p = random_problem(rng, 5, 6, std::numeric_limits<double>::infinity());
    auto result = wasserstein_reweight(p);
    auto oracle = testing::ot_oracle_weights(p);
    REQUIRE(result.weights.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
      CHECK(result.weights[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    double sum = 0;
    for (double w : result.weights) sum += w;
    CHECK(sum == doctest::Approx(mass_target(p)).epsilon(1e-9));
  }
}

TEST_CASE("mass identity holds on capped random instances") {
  util::Rng rng(654);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ReweightProblem p = random_problem(rng, 6, 8, 3.0);
    try {
      auto result = wasserstein_reweight(p);
      ++feasible;
      double sum = 0;
      for (double w : result.weights) {
        CHECK(w >= 0);
        sum += w;
      }
      CHECK(sum == doctest::Approx(mass_target(p)).epsilon(1e-9));
      // cap respect: selections after the mask position never touch the conjecture
      for (std::size_t xi = 0; xi < p.conjectures.size(); ++xi) {
        if (result.masked_at[xi] < 0) continue;
        for (std::size_t t = static_cast<std::size_t>(result.masked_at[xi]) + 1;
             t < result.trace.size(); ++t)
          CHECK(result.trace[t].conjecture != xi);
      }
    } catch (const InfeasibleError&) {
      // acceptable outcome for tight instances
    }
  }
  CHECK(feasible > 150);
}

TEST_CASE("degenerate problems are rejected") {
  ReweightProblem p;
  CHECK_THROWS_AS(wasserstein_reweight(p), InfeasibleError);
  p.conjectures = {vec({1, 0})};
  CHECK_THROWS_AS(wasserstein_reweight(p), InfeasibleError);
}
