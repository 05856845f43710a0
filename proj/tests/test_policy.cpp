#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "corpus/corpus.hpp"
#include "policy/embedding.hpp"
#include "policy/external.hpp"
#include "policy/ngram.hpp"
#include "policy/prompt.hpp"
#include "policy/tokenizer.hpp"
#include "support/reference.hpp"
#include "support/stub_server.hpp"
#include "util/error.hpp"

using namespace stp;
using namespace stp::policy;

TEST_CASE("tokenize examples") {
  CHECK(tokenize("(a + 0) = a") ==
        std::vector<std::string>{"(", "a", "+", "0", ")", "=", "a"});
  CHECK(tokenize("<lemma>") == std::vector<std::string>{"<lemma>"});
  CHECK(tokenize("<easy theorem>") == std::vector<std::string>{"<easy theorem>"});
  CHECK(tokenize("rw <- add_assoc at R [0, 1]; refl") ==
        std::vector<std::string>{"rw", "<-", "add_assoc", "at", "R", "[", "0", ",", "1", "]",
                                 ";", "refl"});
  CHECK(tokenize("x := y") == std::vector<std::string>{"x", ":=", "y"});
  CHECK(tokenize("12 + 3") == std::vector<std::string>{"12", "+", "3"});
  // unknown characters become <unk>
  CHECK(tokenize("a ? b") == std::vector<std::string>{"a", "<unk>", "b"});
}

TEST_CASE("tokenize round-trips canonical text") {
  util::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    kernel::Statement s = testing::random_statement(rng, 3);
    auto tokens = tokenize(s.text());
    CHECK(join_tokens(tokens) == s.text());
  }
  // proof texts round-trip as well
  auto lib = kernel::RuleLibrary::builtin();
  for (int i = 0; i < 50; ++i) {
    auto [s, proof] = testing::random_walk_statement(rng, lib, 2);
    auto tokens = tokenize(proof.text());
    CHECK(join_tokens(tokens) == proof.text());
  }
}

TEST_CASE("prompt rendering uses the formatting tokens") {
  auto stmt = kernel::parse_statement("(a + 0) = a");
  auto proof = kernel::parse_proof("rw add_zero at L []; refl");
  PromptRecord conj = PromptRecord::conjecturer("add_zero", stmt, proof);
  CHECK(conj.text() ==
        "<lemma> add_zero <easy theorem> (a + 0) = a := rw add_zero at L []; refl "
        "<hard theorem>");

  PromptRecord prover = PromptRecord::prover(stmt);
  CHECK(prover.text() == "<theorem> (a + 0) = a <proof>");

  // json round-trip
  PromptRecord conj2 = PromptRecord::from_json(conj.to_json());
  CHECK(conj2.text() == conj.text());
  PromptRecord prover2 = PromptRecord::from_json(prover.to_json());
  CHECK(prover2.text() == prover.text());
}

namespace {
WeightedExample prover_example(const std::string& stmt, const std::string& proof, double w) {
  return WeightedExample{PromptRecord::prover(kernel::parse_statement(stmt)), proof, w};
}
}  // namespace

TEST_CASE("train reproduces a single proof greedily") {
  NgramModel model(4, 0.1);
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 1.0)};
  model = train(std::move(model), examples);

  auto completion = model.sample(examples[0].prompt.tokens(), 0.1, 64, 7);
  CHECK(join_tokens(completion) == "rw add_zero at L []; refl");
}

TEST_CASE("train accumulates weighted counts at the branching context") {
  NgramModel model(2, 0.1);  // order 2: context = previous token only
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 2.0),
      prover_example("(a + 0) = a", "rw zero_add at L []; refl", 1.0),
  };
  model = train(std::move(model), examples);

  // after "rw", counts should be add_zero:2 zero_add:1
  const auto& counts = model.counts();
  auto it = counts.find(std::vector<std::string>{"rw"});
  REQUIRE(it != counts.end());
  CHECK(it->second.at("add_zero") == doctest::Approx(2.0));
  CHECK(it->second.at("zero_add") == doctest::Approx(1.0));
}

TEST_CASE("train on empty example list is the identity") {
  NgramModel model(4, 0.1);
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 1.0)};
  model = train(std::move(model), examples);
  NgramModel copy = model;
  copy = train(std::move(copy), std::span<const WeightedExample>{});
  CHECK(copy.counts_equal(model));
}

TEST_CASE("training is additive over concatenated batches") {
  std::vector<WeightedExample> a = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 1.0),
      prover_example("(0 + b) = b", "rw zero_add at L []; refl", 0.5),
  };
  std::vector<WeightedExample> b = {
      prover_example("(c * 1) = c", "rw mul_one at L []; refl", 2.0),
  };
  std::vector<WeightedExample> ab;
  ab.insert(ab.end(), a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());

  NgramModel two_steps = train(train(NgramModel(4, 0.1), a), b);
  NgramModel one_step = train(NgramModel(4, 0.1), ab);
  CHECK(two_steps.counts_equal(one_step));
}

TEST_CASE("sampling distribution normalizes") {
  NgramModel model(4, 0.1);
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 1.0),
      prover_example("(0 + b) = b", "rw zero_add at L []; refl", 1.0),
  };
  model = train(std::move(model), examples);

  std::vector<std::string> ctx = {"]", ";"};
  for (double temp : {0.25, 1.0, 2.0}) {
    auto dist = model.distribution(ctx, temp);
    double total = 0;
    for (const auto& [tok, p] : dist) {
      CHECK(p >= 0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("low temperature approaches the argmax token") {
  NgramModel model(2, 0.1);
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 3.0),
      prover_example("(a + 0) = a", "rw zero_add at L []; refl", 1.0),
  };
  model = train(std::move(model), examples);

  // context "rw": argmax is add_zero
  auto dist = model.distribution(std::vector<std::string>{"rw"}, 0.01);
  double best_p = 0;
  std::string best_tok;
  for (const auto& [tok, p] : dist)
    if (p > best_p) {
      best_p = p;
      best_tok = tok;
    }
  CHECK(best_tok == "add_zero");
  CHECK(best_p > 0.999);

  // greedy draws pick it regardless of seed
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto completion = model.sample(std::vector<std::string>{"rw"}, 0.01, 1, seed);
    REQUIRE(completion.size() == 1);
    CHECK(completion[0] == "add_zero");
  }
}

TEST_CASE("sampling is deterministic in (model, prompt, seed)") {
  auto lib = kernel::RuleLibrary::builtin();
  corpus::GeneratorOptions opt;
  opt.files = 2;
  opt.theorems_per_file = 20;
  corpus::Corpus c = corpus::generate_seed_corpus(5, opt, lib);

  std::vector<WeightedExample> examples;
  for (const auto& ex : corpus::extract_prover_sft(c))
    examples.push_back(WeightedExample{PromptRecord::prover(ex.statement), ex.proof.text(), 1.0});
  NgramModel model = train(NgramModel(4, 0.1), examples);

  PromptRecord prompt = PromptRecord::prover(kernel::parse_statement("(q + 0) = q"));
  std::string s1 = model.sample_text(prompt, 1.0, 256, 42);
  std::string s2 = model.sample_text(prompt, 1.0, 256, 42);
  CHECK(s1 == s2);
  std::string s3 = model.sample_text(prompt, 1.0, 256, 43);
  // different seeds are allowed to coincide but almost never do on this model
  bool all_same = s1 == s3;
  for (std::uint64_t seed = 44; seed < 52 && all_same; ++seed)
    all_same = model.sample_text(prompt, 1.0, 256, seed) == s1;
  CHECK_FALSE(all_same);
}

TEST_CASE("untrained model terminates within the cap") {
  NgramModel model(4, 0.1);
  auto completion = model.sample(std::vector<std::string>{"<theorem>"}, 1.0, 16, 3);
  CHECK(completion.size() <= 16);
}

TEST_CASE("model snapshot round-trip is byte-identical") {
  NgramModel model(3, 0.25);
  std::vector<WeightedExample> examples = {
      prover_example("(a + 0) = a", "rw add_zero at L []; refl", 1.0),
      prover_example("(2 * 3) = 6", "eval", 0.125),
  };
  model = train(std::move(model), examples);

  auto dir = std::filesystem::temp_directory_path() / "stp_model_test";
  std::filesystem::create_directories(dir);
  auto p1 = dir / "m1.model";
  auto p2 = dir / "m2.model";
  model.save(p1);
  NgramModel loaded = NgramModel::load(p1);
  loaded.save(p2);
  CHECK(util::read_text_file(p1) == util::read_text_file(p2));
  CHECK(loaded.counts_equal(model));

  // loaded model samples identically
  PromptRecord prompt = PromptRecord::prover(kernel::parse_statement("(a + 0) = a"));
  CHECK(model.sample_text(prompt, 1.0, 64, 9) == loaded.sample_text(prompt, 1.0, 64, 9));
  std::filesystem::remove_all(dir);
}

TEST_CASE("embedding examples") {
  auto s1 = kernel::parse_statement("(a + b) = c");
  auto s2 = kernel::parse_statement("(a + b) = c");
  CHECK(cosine(embed(s1), embed(s2)) == doctest::Approx(1.0));

  // vectors with disjoint support have cosine 0 and matching cost d = 0
  EmbeddingVector u(kEmbeddingDim, 0.0), v(kEmbeddingDim, 0.0);
  u[3] = 1.0;
  v[7] = 1.0;
  CHECK(cosine(u, v) == 0.0);

  // real statements always share "=", so similarity sits strictly inside (0, 1)
  double shared = cosine(embed(kernel::parse_statement("a = b")),
                         embed(kernel::parse_statement("c = d")));
  CHECK(shared > 0);
  CHECK(shared < 1);

  CHECK(embed(s1).size() == kEmbeddingDim);
  double norm = 0;
  for (double x : embed(s1)) norm += x * x;
  CHECK(std::abs(norm - 1.0) < 1e-9);
}

TEST_CASE("embedding cosine matches a reference dot product over raw counts") {
  // reference: raw token-count maps folded with the same stable index
  auto reference_cosine = [](const kernel::Statement& a, const kernel::Statement& b) {
    std::map<std::uint32_t, double> ca, cb;
    for (const auto& t : tokenize(a.text())) ca[stable_token_index(t)] += 1;
    for (const auto& t : tokenize(b.text())) cb[stable_token_index(t)] += 1;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [k, v] : ca) {
      na += v * v;
      auto it = cb.find(k);
      if (it != cb.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : cb) nb += v * v;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };

  auto s1 = kernel::parse_statement("(a + b) = c");
  auto s2 = kernel::parse_statement("(a + b) = d");
  CHECK(cosine(embed(s1), embed(s2)) == doctest::Approx(reference_cosine(s1, s2)).epsilon(1e-12));

  util::Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    auto a = testing::random_statement(rng, 3);
    auto b = testing::random_statement(rng, 3);
    CHECK(cosine(embed(a), embed(b)) == doctest::Approx(reference_cosine(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("external_generate echo server") {
  testing::StubServer server([](const std::string& line) {
    auto req = util::Json::parse(line);
    util::Json resp;
    resp["id"] = req.at("id");
    resp["completion"] = "fixed text";
    return resp.dump() + "\n";
  });

  std::vector<PromptRecord> prompts;
  for (int i = 0; i < 5; ++i)
    prompts.push_back(PromptRecord::prover(kernel::parse_statement("(a + 0) = a")));
  auto completions = external_generate(prompts, server.endpoint());
  REQUIRE(completions.size() == 5);
  for (const auto& c : completions) CHECK(c == "fixed text");
}

TEST_CASE("external_generate isolates malformed responses") {
  testing::StubServer server([](const std::string& line) {
    auto req = util::Json::parse(line);
    std::size_t id = req.at("id").get<std::size_t>();
    if (id == 2) return std::string("this is not json\n");
    util::Json resp;
    resp["id"] = id;
    resp["completion"] = "ok " + std::to_string(id);
    return resp.dump() + "\n";
  });

  std::vector<PromptRecord> prompts;
  for (int i = 0; i < 5; ++i)
    prompts.push_back(PromptRecord::prover(kernel::parse_statement("(a + 0) = a")));
  ExternalOptions opt;
  opt.request_timeout = std::chrono::milliseconds(500);
  auto completions = external_generate(prompts, server.endpoint(), opt);
  REQUIRE(completions.size() == 5);
  CHECK(completions[0] == "ok 0");
  CHECK(completions[1] == "ok 1");
  CHECK(completions[2] == "");  // malformed payload -> empty
  CHECK(completions[3] == "ok 3");
  CHECK(completions[4] == "ok 4");
}

TEST_CASE("external_generate 100-prompt batch preserves order") {
  testing::StubServer server([](const std::string& line) {
    auto req = util::Json::parse(line);
    util::Json resp;
    resp["id"] = req.at("id");
    resp["completion"] = "c" + std::to_string(req.at("id").get<int>());
    return resp.dump() + "\n";
  });

  std::vector<PromptRecord> prompts;
  for (int i = 0; i < 100; ++i)
    prompts.push_back(PromptRecord::prover(kernel::parse_statement("(a + 0) = a")));
  auto completions = external_generate(prompts, server.endpoint());
  REQUIRE(completions.size() == 100);
  for (int i = 0; i < 100; ++i) CHECK(completions[static_cast<std::size_t>(i)] == "c" + std::to_string(i));
}

TEST_CASE("external_generate unreachable endpoint") {
  std::vector<PromptRecord> prompts = {
      PromptRecord::prover(kernel::parse_statement("(a + 0) = a"))};
  CHECK_THROWS_AS(external_generate(prompts, "127.0.0.1:1"), TransportError);
}
