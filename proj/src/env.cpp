#include "patrol/env.hpp"

#include <algorithm>
#include <cstdio>

#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/kernels.hpp"
#include "patrol/policy.hpp"

namespace patrol {

void RewardParams::validate() const {
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
  if (!(nu < 0.0)) throw Error(ErrorCode::kInvalidArgument, "nu must be negative");
  if (!(alpha_plus >= alpha_minus)) throw Error(ErrorCode::kInvalidArgument, "alpha_plus must be >= alpha_minus");
}

std::string_view to_string(StartMode mode) { return mode == StartMode::kBest ? "best" : "random"; }

StartMode parse_start_mode(std::string_view text) {
  if (text == "best" || text == "Best") return StartMode::kBest;
  if (text == "random" || text == "Random") return StartMode::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown start mode '" + std::string(text) + "'");
}

void EnvConfig::validate() const {
  if (num_agents < 1) throw Error(ErrorCode::kInvalidArgument, "num_agents must be >= 1");
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  if (line_of_sight < 1) throw Error(ErrorCode::kInvalidArgument, "line_of_sight must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "discount must lie in (0, 1]");
  reward.validate();
}

std::string canonical_string(const EnvConfig& config) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "agents=%d;los=%d;start=%s;horizon=%d;eta=%.17g;phi=%.17g;nu=%.17g;alpha_minus=%.17g;"
                "alpha_plus=%.17g;discount=%.17g",
                config.num_agents, config.line_of_sight, std::string(to_string(config.start_mode)).c_str(),
                config.horizon, config.reward.eta, config.reward.phi, config.reward.nu, config.reward.alpha_minus,
                config.reward.alpha_plus, config.discount);
  return buf;
}

std::string config_hash(const EnvConfig& config) { return hex64(fnv1a64(canonical_string(config))); }

IndividualReward individual_reward(const RewardParams& params, bool monitored, double sigma, std::int32_t visits) {
  if (!monitored) return {params.nu, 0.0, RewardBranch::kOutsideMonitored};
  double tau = 0.0;
  if (visits == 1) tau = sigma >= params.phi ? params.alpha_plus : params.alpha_minus;
  const double value = sigma / (params.eta * static_cast<double>(visits));
  if (value >= 1.0) return {value + tau, tau, RewardBranch::kAboveOne};
  return {value + tau + params.nu / 2.0, tau, RewardBranch::kBelowOne};
}

std::pair<EnvState, std::vector<Observation>> reset(const PatrolGraph& graph, const EnvConfig& config,
                                                    std::uint64_t seed) {
  config.validate();
  EnvState state;
  state.rng = Rng(seed);
  state.visits.assign(graph.size(), 0);
  const auto n = static_cast<std::size_t>(config.num_agents);
  if (graph.monitored().size() < n) {
    throw Error(ErrorCode::kTooManyAgents, std::to_string(n) + " agents but only " +
                                               std::to_string(graph.monitored().size()) + " monitored nodes");
  }
  if (config.start_mode == StartMode::kBest) {
    const auto ranking = rank_monitored(graph);
    state.positions.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    // Partial Fisher-Yates over the monitored set.
    std::vector<NodeId> pool(graph.monitored().begin(), graph.monitored().end());
    for (std::size_t k = 0; k < n; ++k) {
      const auto j = k + static_cast<std::size_t>(state.rng.uniform_index(pool.size() - k));
      std::swap(pool[k], pool[j]);
      state.positions.push_back(pool[k]);
    }
  }
  for (NodeId p : state.positions) state.visits[static_cast<std::size_t>(p)] = 1;

  std::vector<Observation> observations;
  observations.reserve(n);
  for (int a = 0; a < config.num_agents; ++a) observations.push_back(observe(graph, state, config, a));
  return {std::move(state), std::move(observations)};
}

std::vector<Action> legal_actions(const PatrolGraph& graph, const EnvState& state, int agent) {
  if (agent < 0 || static_cast<std::size_t>(agent) >= state.positions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "agent index " + std::to_string(agent) + " out of range");
  }
  std::vector<Action> actions{Action::stay()};
  for (NodeId v : graph.neighbors(state.positions[static_cast<std::size_t>(agent)])) {
    actions.push_back(Action::move_to(v));
  }
  return actions;
}

StepResult step(const PatrolGraph& graph, EnvState& state, const EnvConfig& config, std::span<const Action> actions) {
  const auto n = state.positions.size();
  if (state.t >= config.horizon) throw Error(ErrorCode::kEpisodeFinished, "t = " + std::to_string(state.t));
  if (actions.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(n) + " actions, got " + std::to_string(actions.size()));
  }
  std::vector<NodeId> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId from = state.positions[i];
    const Action& a = actions[i];
    if (!a.is_stay()) {
      const auto nb = graph.neighbors(from);
      if (!std::binary_search(nb.begin(), nb.end(), a.target)) {
        throw Error(ErrorCode::kIllegalAction, "agent " + std::to_string(i) + " cannot move from node " +
                                                   std::to_string(from) + " to node " + std::to_string(a.target));
      }
    }
    next[i] = a.destination(from);
  }

  StepResult result;
  result.individual_rewards.resize(n);
  result.branches.resize(n);
  result.exploration.resize(n);
  // Arrivals are counted in ascending agent order; only the agent that takes a
  // node's count to 1 can receive the exploration bonus.
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = next[i];
    const std::int32_t count = ++state.visits[static_cast<std::size_t>(v)];
    const auto r = individual_reward(config.reward, graph.is_monitored(v), graph.node(v).sigma, count);
    result.individual_rewards[i] = r.value;
    result.branches[i] = r.branch;
    result.exploration[i] = r.tau;
  }
  state.positions = std::move(next);
  ++state.t;

  double team = 0.0;
  for (double r : result.individual_rewards) team += r;
  result.team_sum = team;
  result.joint_rewards.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.joint_rewards[i] = result.individual_rewards[i] + team;

  result.done = state.t == config.horizon;
  result.observations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.observations.push_back(observe(graph, state, config, static_cast<int>(i)));
  return result;
}

Observation observe(const PatrolGraph& graph, const EnvState& state, const EnvConfig& config, int agent) {
  if (agent < 0 || static_cast<std::size_t>(agent) >= state.positions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "agent index " + std::to_string(agent) + " out of range");
  }
  Observation obs;
  obs.observer = agent;
  obs.agent_positions = state.positions;
  obs.target_values = graph.sigma();
  obs.visible_visits.resize(graph.size());
  const GridPos at = graph.node(state.positions[static_cast<std::size_t>(agent)]).grid_pos;
  kernels::active().mask_visits(graph.node_rows().data(), graph.node_cols().data(), state.visits.data(),
                                obs.visible_visits.data(), graph.size(), at.row, at.col, config.line_of_sight);
  return obs;
}

double RolloutResult::team_joint_total() const {
  double total = 0.0;
  for (double r : joint_totals) total += r;
  return total;
}

RolloutResult rollout(const PatrolGraph& graph, const EnvConfig& config, Policy& policy, std::uint64_t seed) {
  auto [state, observations] = reset(graph, config, seed);
  Rng policy_rng(derive_seed(seed, 1));
  policy.begin_episode(graph, config);

  const auto n = static_cast<std::size_t>(config.num_agents);
  RolloutResult out;
  out.log.seed = seed;
  out.log.config_hash = config_hash(config);
  out.log.num_nodes = graph.size();
  out.log.horizon = config.horizon;
  out.log.routes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.log.routes[i].reserve(static_cast<std::size_t>(config.horizon) + 1);
    out.log.routes[i].push_back(state.positions[i]);
  }
  out.individual_totals.assign(n, 0.0);
  out.joint_totals.assign(n, 0.0);

  JointAction actions(n);
  while (state.t < config.horizon) {
    // Every agent decides from the same pre-move state.
    for (std::size_t i = 0; i < n; ++i) {
      const auto legal = legal_actions(graph, state, static_cast<int>(i));
      const DecisionContext ctx{graph, config, static_cast<int>(i), state.t, observations[i], legal};
      actions[i] = policy.act(ctx, policy_rng);
    }
    StepResult result = step(graph, state, config, actions);
    for (std::size_t i = 0; i < n; ++i) {
      out.log.routes[i].push_back(state.positions[i]);
      out.individual_totals[i] += result.individual_rewards[i];
      out.joint_totals[i] += result.joint_rewards[i];
    }
    observations = std::move(result.observations);
  }
  return out;
}

}  // namespace patrol
