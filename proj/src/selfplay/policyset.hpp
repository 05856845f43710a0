#pragma once

#include <filesystem>
#include <span>

#include "policy/ngram.hpp"

namespace stp::selfplay {

// The model pair behind both roles. By default one shared model serves the
// conjecturer and the prover, distinguished only by prompt tokens; the
// split-roles escape hatch keeps two independent models.
class PolicySet {
 public:
  PolicySet() : PolicySet(4, 0.1, false) {}
  PolicySet(int order, double alpha, bool split)
      : split_(split), shared_(order, alpha), prover_(order, alpha) {}

  bool split() const { return split_; }

  const policy::NgramModel& model_for(policy::Role role) const {
    if (split_ && role == policy::Role::prover) return prover_;
    return shared_;
  }

  void train(std::span<const policy::WeightedExample> examples) {
    if (!split_) {
      shared_ = policy::train(std::move(shared_), examples);
      return;
    }
    std::vector<policy::WeightedExample> conj, prov;
    for (const auto& ex : examples)
      (ex.prompt.role == policy::Role::conjecturer ? conj : prov).push_back(ex);
    shared_ = policy::train(std::move(shared_), conj);
    prover_ = policy::train(std::move(prover_), prov);
  }

  std::string sample(const policy::PromptRecord& prompt, double temperature, int max_tokens,
                     std::uint64_t seed) const {
    return model_for(prompt.role).sample_text(prompt, temperature, max_tokens, seed);
  }

  void save(const std::filesystem::path& dir, const std::string& stem) const {
    if (split_) {
      shared_.save(dir / (stem + ".conjecturer.model"));
      prover_.save(dir / (stem + ".prover.model"));
    } else {
      shared_.save(dir / (stem + ".model"));
    }
  }

  static PolicySet load(const std::filesystem::path& dir, const std::string& stem, bool split) {
    PolicySet set;
    set.split_ = split;
    if (split) {
      set.shared_ = policy::NgramModel::load(dir / (stem + ".conjecturer.model"));
      set.prover_ = policy::NgramModel::load(dir / (stem + ".prover.model"));
    } else {
      set.shared_ = policy::NgramModel::load(dir / (stem + ".model"));
      set.prover_ = set.shared_;
    }
    return set;
  }

  bool counts_equal(const PolicySet& other) const {
    if (split_ != other.split_) return false;
    if (!shared_.counts_equal(other.shared_)) return false;
    return !split_ || prover_.counts_equal(other.prover_);
  }

 private:
  bool split_;
  policy::NgramModel shared_;  // conjecturer model when split
  policy::NgramModel prover_;
};

}  // namespace stp::selfplay
