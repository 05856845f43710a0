#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "policy/prompt.hpp"

namespace stp::policy {

// Back-off n-gram sequence model with additive smoothing. Training is
// weighted count accumulation over completion tokens (prompts condition but
// are never predicted), which makes it exact for the weighted cross-entropy
// objective. Counts are kept in canonical sorted maps so snapshots are
// diffable and clone-and-extend retraining is bit-reproducible.
class NgramModel {
 public:
  NgramModel() : NgramModel(4, 0.1) {}
  NgramModel(int order, double alpha);

  NgramModel(const NgramModel& other);
  NgramModel(NgramModel&& other) noexcept;
  NgramModel& operator=(const NgramModel& other);
  NgramModel& operator=(NgramModel&& other) noexcept;

  int order() const { return order_; }
  double alpha() const { return alpha_; }

  // Accumulates one weighted example and invalidates the sampling tables.
  void add(std::span<const std::string> prompt_tokens,
           std::span<const std::string> completion_tokens, double weight);

  // Autoregressive sampling; stops at the end token or max_tokens. The end
  // token is not included in the result. Deterministic in (model, prompt,
  // seed). temperature must be positive.
  std::vector<std::string> sample(std::span<const std::string> prompt_tokens, double temperature,
                                  int max_tokens, std::uint64_t seed) const;
  std::string sample_text(const PromptRecord& prompt, double temperature, int max_tokens,
                          std::uint64_t seed) const;

  // Full smoothed next-token distribution for the given context (test hook).
  std::vector<std::pair<std::string, double>> distribution(
      std::span<const std::string> context, double temperature) const;

  // Canonical text snapshot; save -> load -> save is byte-identical.
  void save(const std::filesystem::path& path) const;
  static NgramModel load(const std::filesystem::path& path);
  std::string snapshot_text() const;
  static NgramModel from_snapshot_text(const std::string& text);

  using CountTable = std::map<std::vector<std::string>, std::map<std::string, double>>;
  const CountTable& counts() const { return counts_; }

  bool counts_equal(const NgramModel& other) const {
    return order_ == other.order_ && alpha_ == other.alpha_ && counts_ == other.counts_;
  }

  std::vector<std::string> vocabulary() const;

 private:
  struct SparseRow {
    std::vector<std::pair<std::uint32_t, double>> entries;  // (token id, weight), id-sorted
  };

  void ensure_finalized() const;
  std::uint32_t token_id(const std::string& token) const;
  std::uint64_t pack_context(const std::uint32_t* ids, int len) const;

  // Draws one token id from the smoothed distribution for the context ending
  // at `ids[len]` (backing off to shorter contexts), using u in [0, 1).
  std::uint32_t draw(const std::vector<std::uint32_t>& context, double temperature,
                     double u) const;

  int order_;
  double alpha_;
  CountTable counts_;

  // finalized sampling structures; built once per mutation under the lock so
  // that concurrent samplers never race the lazy build
  mutable std::mutex finalize_mutex_;
  mutable bool finalized_ = false;
  mutable std::vector<std::string> vocab_;  // sorted; index = token id
  mutable std::unordered_map<std::string, std::uint32_t> vocab_index_;
  mutable std::vector<std::unordered_map<std::uint64_t, SparseRow>> tables_;  // by context length
};

// Functional wrapper: returns the model extended by the examples.
NgramModel train(NgramModel model, std::span<const WeightedExample> examples);

}  // namespace stp::policy
