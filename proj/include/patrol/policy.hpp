#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "patrol/env.hpp"

namespace patrol {

struct DecisionContext {
  const PatrolGraph& graph;
  const EnvConfig& config;
  int agent;
  int t;
  const Observation& observation;
  std::span<const Action> legal;
};

// Shared behaviour for all agents: one decision per (agent, step). The
// returned action must belong to `ctx.legal`.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual Action act(const DecisionContext& ctx, Rng& rng) = 0;
  // Called by rollout before the first step of every episode.
  virtual void begin_episode(const PatrolGraph& /*graph*/, const EnvConfig& /*config*/) {}
  // Independent copy for use in another rollout.
  virtual std::unique_ptr<Policy> clone() const = 0;
};

}  // namespace patrol
