#pragma once

#include <memory>

#include "patrol/policy.hpp"

namespace patrol {

enum class GreedyScore {
  kDiscounted,  // sigma / (eta * (visits + 1)): the value term earned on arrival
  kRaw,         // sigma alone
};

// Each agent moves to the reachable node (itself included) with the highest
// momentary score; ties go to the lowest node id. Deterministic.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(GreedyScore score = GreedyScore::kDiscounted) : score_(score) {}

  std::string name() const override { return score_ == GreedyScore::kRaw ? "greedy-raw" : "greedy"; }
  Action act(const DecisionContext& ctx, Rng& rng) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GreedyPolicy>(*this); }

  // Score of moving onto `node` as seen by this policy.
  double score(const DecisionContext& ctx, NodeId node) const;

 private:
  GreedyScore score_;
};

// Uniform over the legal actions, drawn from the rollout's policy stream.
class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  Action act(const DecisionContext& ctx, Rng& rng) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }
};

std::unique_ptr<Policy> greedy_policy(GreedyScore score = GreedyScore::kDiscounted);
std::unique_ptr<Policy> random_policy();

}  // namespace patrol
