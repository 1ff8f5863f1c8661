#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patrol/rng.hpp"
#include "patrol/terrain.hpp"

namespace patrol {

struct RewardParams {
  double eta = 10.0;          // normalization factor
  double phi = 10.0;          // relevance threshold
  double nu = -25.0;          // coverage factor (penalty)
  double alpha_minus = 5.0;   // exploration reward
  double alpha_plus = 50.0;   // optimal exploration reward

  // Preset for sparse, large zones: softer penalty, doubled exploration rewards.
  static RewardParams sparse_zone() { return {10.0, 10.0, -10.0, 10.0, 100.0}; }

  void validate() const;
  bool operator==(const RewardParams&) const = default;
};

enum class StartMode { kRandom, kBest };

std::string_view to_string(StartMode mode);
StartMode parse_start_mode(std::string_view text);

struct EnvConfig {
  int num_agents = 2;
  int line_of_sight = 3;  // Chebyshev radius in grid cells
  StartMode start_mode = StartMode::kRandom;
  int horizon = 50;
  RewardParams reward;
  double discount = 0.99;

  void validate() const;
  bool operator==(const EnvConfig&) const = default;
};

// Canonical one-line description used for hashing and provenance.
std::string canonical_string(const EnvConfig& config);
// Hex FNV-1a of canonical_string.
std::string config_hash(const EnvConfig& config);

struct Action {
  enum class Kind : std::uint8_t { kStay, kMove };
  Kind kind = Kind::kStay;
  NodeId target = -1;

  static Action stay() { return {}; }
  static Action move_to(NodeId node) { return {Kind::kMove, node}; }
  bool is_stay() const { return kind == Kind::kStay; }
  // Node the agent occupies after the action.
  NodeId destination(NodeId current) const { return is_stay() ? current : target; }
  bool operator==(const Action&) const = default;
};

using JointAction = std::vector<Action>;

inline constexpr std::int32_t kMaskedVisits = -1;

struct Observation {
  int observer = 0;
  std::vector<NodeId> agent_positions;
  // Visit counts inside the observer's line-of-sight box, kMaskedVisits elsewhere.
  std::vector<std::int32_t> visible_visits;
  // Target values of every node; views the graph, which must outlive this.
  std::span<const double> target_values;
};

struct EnvState {
  int t = 0;
  std::vector<NodeId> positions;
  std::vector<std::int32_t> visits;
  Rng rng;
};

// Which case of the individual reward fired for an agent.
enum class RewardBranch : std::uint8_t { kOutsideMonitored, kAboveOne, kBelowOne };

struct StepResult {
  std::vector<double> individual_rewards;
  std::vector<double> joint_rewards;
  // Sum of individual rewards in ascending agent order; joint = individual + team_sum.
  double team_sum = 0.0;
  std::vector<RewardBranch> branches;
  std::vector<double> exploration;  // tau granted to each agent
  std::vector<Observation> observations;
  bool done = false;
};

struct IndividualReward {
  double value = 0.0;
  double tau = 0.0;
  RewardBranch branch = RewardBranch::kOutsideMonitored;
};

// Reward for an agent on a node whose count already includes its own arrival.
IndividualReward individual_reward(const RewardParams& params, bool monitored, double sigma, std::int32_t visits);

std::pair<EnvState, std::vector<Observation>> reset(const PatrolGraph& graph, const EnvConfig& config,
                                                    std::uint64_t seed);

std::vector<Action> legal_actions(const PatrolGraph& graph, const EnvState& state, int agent);

// Advances all agents simultaneously. On error the state is left untouched.
StepResult step(const PatrolGraph& graph, EnvState& state, const EnvConfig& config, std::span<const Action> actions);

Observation observe(const PatrolGraph& graph, const EnvState& state, const EnvConfig& config, int agent);

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t num_nodes = 0;
  int horizon = 0;
  // routes[agent] has horizon + 1 entries, starting position first.
  std::vector<std::vector<NodeId>> routes;

  bool operator==(const EpisodeLog&) const = default;
};

std::string serialize_episode(const EpisodeLog& log);
EpisodeLog parse_episode(const std::string& text);
void save_episode(const EpisodeLog& log, const std::filesystem::path& path);
EpisodeLog load_episode(const std::filesystem::path& path);

class Policy;

struct RolloutResult {
  EpisodeLog log;
  std::vector<double> individual_totals;
  std::vector<double> joint_totals;
  double team_joint_total() const;
};

// reset + horizon steps. The policy draws from its own stream derived from seed.
RolloutResult rollout(const PatrolGraph& graph, const EnvConfig& config, Policy& policy, std::uint64_t seed);

}  // namespace patrol
