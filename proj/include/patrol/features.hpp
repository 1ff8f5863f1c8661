#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "patrol/env.hpp"

namespace patrol {

// Action slots of the policy head. The graph is 4-connected on a grid, so every
// move is one of four compass directions.
enum class Slot : int { kStay = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };
inline constexpr int kNumSlots = 5;

// Slot of the move from `from` to the adjacent node `to` (kStay when equal).
Slot slot_of(const PatrolGraph& graph, NodeId from, NodeId to);

struct SlotFeatures {
  double sigma = 0.0;        // sigma / max sigma
  double discounted = 0.0;   // sigma / (max sigma * (visits + 1))
  double present = 0.0;      // 1 when the slot maps to a node
  double monitored = 0.0;    // 1 when that node is monitored
  double unvisited = 0.0;    // 1 when the observed count is 0
  double progress = 0.0;     // Manhattan steps gained toward the target node, in {-1, 0, 1}
  double crowding = 0.0;     // share of the other agents within one cell of the node
  double frontier = 0.0;     // same gain toward the best node not known to be visited (masked counts included)
};

struct FeatureVector {
  std::array<SlotFeatures, kNumSlots> slots{};
  std::array<NodeId, kNumSlots> slot_nodes{-1, -1, -1, -1, -1};
  double frac_unvisited = 0.0;   // masked entries count as unvisited
  double nearest_agent = 1.0;    // Chebyshev distance / max(rows, cols); 1 with no peers
  double nearest_target = 1.0;   // to the highest-sigma in-sight unvisited node; 1 if none
  double remaining = 1.0;        // (T - t) / T

  static constexpr std::size_t kPerSlot = 8;
  static constexpr std::size_t kLength = kNumSlots * kPerSlot + 4;

  // Fixed-length flattening: slot blocks in slot order, then the globals.
  std::vector<double> flat() const;
};

FeatureVector featurize(const PatrolGraph& graph, const Observation& observation, int agent, int t,
                        const EnvConfig& config);

// Policy-head inputs: one row per slot.
inline constexpr std::size_t kActionFeatures = 11;
// Per-agent value-head inputs (bias included).
inline constexpr std::size_t kValueFeatures = 10;

using ActionFeatures = std::array<std::array<double, kActionFeatures>, kNumSlots>;
using ValueFeatures = std::array<double, kValueFeatures>;

ActionFeatures action_features(const FeatureVector& f);
ValueFeatures value_features(const FeatureVector& f);

// Describes the feature layout; its hash guards serialized parameters.
std::string feature_schema();
std::string feature_schema_hash();

}  // namespace patrol
