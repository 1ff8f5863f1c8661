#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "patrol/features.hpp"
#include "patrol/metrics.hpp"
#include "patrol/policy.hpp"

namespace patrol {

struct LearnerConfig {
  double learning_rate = 0.0005;
  double gae_lambda = 0.95;
  double entropy_coeff = 0.01;
  double kl_coeff = 0.3;  // held fixed, no adaptive schedule
  bool use_gae = true;
  double clip_epsilon = 0.2;
  double discount = 0.99;
  int episodes_per_update = 8;
  int total_updates = 300;
  std::uint64_t seed = 0;

  // Optimisation details of the desk-scale learner.
  int epochs = 8;
  int minibatch_size = 128;
  double value_coeff = 0.5;
  double reward_scale = 0.01;  // applied to team rewards before GAE
  int jobs = 1;                // rollout worker threads

  void validate() const;
};

// Shared policy head (one weight per action feature) and per-agent value head.
struct PolicyParams {
  std::vector<double> policy = std::vector<double>(kActionFeatures, 0.0);
  std::vector<double> value = std::vector<double>(kValueFeatures, 0.0);

  std::size_t size() const { return policy.size() + value.size(); }
  // Concatenated policy then value weights, for optimisers and gradient checks.
  std::vector<double> flat() const;
  static PolicyParams from_flat(std::span<const double> flat);
  bool operator==(const PolicyParams&) const = default;
};

using LegalMask = std::array<std::uint8_t, kNumSlots>;

struct ActionDistribution {
  std::array<double, kNumSlots> logits{};
  std::array<double, kNumSlots> probs{};      // exactly 0 on illegal slots
  std::array<double, kNumSlots> log_probs{};  // -inf on illegal slots
  LegalMask legal{};
  int argmax() const;
};

ActionDistribution action_distribution(const PolicyParams& params, const ActionFeatures& features,
                                       const LegalMask& legal);

double agent_value(const PolicyParams& params, const ValueFeatures& features);
// Sum of agent_value over the agents, in agent order.
double joint_value(const PolicyParams& params, std::span<const ValueFeatures> agents);

// Advantages for one episode. `values` holds V(s_0..s_T) with V(s_T) the
// bootstrap (0 for a terminal state).
std::vector<double> gae_advantages(std::span<const double> rewards, std::span<const double> values, double gamma,
                                   double lambda);

struct AgentSample {
  ActionFeatures features{};
  LegalMask legal{};
  int slot = 0;
  double old_log_prob = 0.0;
  std::array<double, kNumSlots> old_probs{};
  std::size_t step = 0;  // index into Batch::steps
  double advantage = 0.0;
};

struct StepSample {
  std::vector<ValueFeatures> agents;
  double reward = 0.0;  // scaled team reward
  double value_target = 0.0;
};

struct Batch {
  std::vector<AgentSample> samples;
  std::vector<StepSample> steps;
};

// Mean over `indices` of clipped surrogate + entropy bonus - KL penalty -
// value loss. Fills `grad` (same layout as params) when non-null.
double surrogate_objective(const PolicyParams& params, const Batch& batch, std::span<const std::size_t> indices,
                           const LearnerConfig& config, PolicyParams* grad);

struct EpisodeBatch {
  Batch batch;
  double team_joint_reward = 0.0;  // sum over agents and steps of the joint reward
  EpisodeLog log;
};

// One rollout with the stochastic policy, recording training samples.
EpisodeBatch collect_episode(const PatrolGraph& graph, const EnvConfig& env_config, const LearnerConfig& config,
                             const PolicyParams& params, std::uint64_t seed);

// Fills advantages and value targets of an episode batch in place.
void compute_advantages(Batch& batch, const PolicyParams& params, const LearnerConfig& config);

struct TrainResult {
  PolicyParams params;
  std::vector<double> curve;  // mean episode team joint reward per update
};

TrainResult train(const PatrolGraph& graph, const EnvConfig& env_config, const LearnerConfig& config,
                  const std::function<void(int, double)>& on_update = {});

class LearnedPolicy final : public Policy {
 public:
  explicit LearnedPolicy(PolicyParams params, bool sampled = true) : params_(std::move(params)), sampled_(sampled) {}

  std::string name() const override { return sampled_ ? "trained" : "trained-argmax"; }
  Action act(const DecisionContext& ctx, Rng& rng) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<LearnedPolicy>(*this); }
  const PolicyParams& params() const { return params_; }

 private:
  PolicyParams params_;
  bool sampled_;
};

// num_runs rollouts with seeds derive_seed(seed, run), run in parallel over
// `jobs` threads; results are ordered by run.
std::vector<RolloutResult> run_batch(const PatrolGraph& graph, const EnvConfig& config, const Policy& prototype,
                                     int num_runs, std::uint64_t seed, int jobs = 1);

struct Evaluation {
  CoverageReport report;
  double mean_team_joint_reward = 0.0;
  std::vector<EpisodeLog> episodes;
};

Evaluation evaluate(const PatrolGraph& graph, const EnvConfig& config, const Policy& prototype, int num_runs,
                    std::uint64_t seed, std::span<const double> psi_values = kDefaultPsi, bool pooled = false,
                    int jobs = 1);

Evaluation evaluate_policy(const PatrolGraph& graph, const EnvConfig& config, const PolicyParams& params,
                           int num_runs, std::uint64_t seed, bool sampled = true,
                           std::span<const double> psi_values = kDefaultPsi, bool pooled = false, int jobs = 1);

std::string serialize_params(const PolicyParams& params);
// Throws kSchemaMismatch when the stored feature-schema hash differs.
PolicyParams parse_params(const std::string& text);
void save_params(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_params(const std::filesystem::path& path);

std::string serialize_curve(std::span<const double> curve);

}  // namespace patrol
