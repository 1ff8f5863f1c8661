#include "patrol/features.hpp"

#include <algorithm>
#include <cstdlib>

#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/kernels.hpp"

namespace patrol {

Slot slot_of(const PatrolGraph& graph, NodeId from, NodeId to) {
  if (from == to) return Slot::kStay;
  const GridPos a = graph.node(from).grid_pos;
  const GridPos b = graph.node(to).grid_pos;
  if (b.col == a.col && b.row == a.row - 1) return Slot::kUp;
  if (b.col == a.col && b.row == a.row + 1) return Slot::kDown;
  if (b.row == a.row && b.col == a.col - 1) return Slot::kLeft;
  if (b.row == a.row && b.col == a.col + 1) return Slot::kRight;
  throw Error(ErrorCode::kInvalidArgument,
              "nodes " + std::to_string(from) + " and " + std::to_string(to) + " are not grid neighbours");
}

std::vector<double> FeatureVector::flat() const {
  std::vector<double> out;
  out.reserve(kLength);
  for (const SlotFeatures& s : slots) {
    out.insert(out.end(), {s.sigma, s.discounted, s.present, s.monitored, s.unvisited, s.progress, s.crowding, s.frontier});
  }
  out.insert(out.end(), {frac_unvisited, nearest_agent, nearest_target, remaining});
  return out;
}

namespace {
int manhattan(GridPos a, GridPos b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }
}  // namespace

FeatureVector featurize(const PatrolGraph& graph, const Observation& observation, int agent, int t,
                        const EnvConfig& config) {
  FeatureVector f;
  const std::size_t m = graph.size();
  const auto& visits = observation.visible_visits;
  const auto sigma = observation.target_values;
  double sigma_max = 0.0;
  for (double s : sigma) sigma_max = std::max(sigma_max, s);
  if (sigma_max <= 0.0) sigma_max = 1.0;
  const double extent = static_cast<double>(std::max(graph.rows(), graph.cols()));

  const NodeId here = observation.agent_positions[static_cast<std::size_t>(agent)];
  const GridPos here_pos = graph.node(here).grid_pos;
  f.slot_nodes[0] = here;
  for (NodeId v : graph.neighbors(here)) f.slot_nodes[static_cast<std::size_t>(slot_of(graph, here, v))] = v;

  // Highest-sigma node seen with zero visits; masked nodes are not candidates.
  NodeId target = -1;
  for (std::size_t v = 0; v < m; ++v) {
    if (visits[v] != 0) continue;
    if (target < 0 || sigma[v] > sigma[static_cast<std::size_t>(target)]) target = static_cast<NodeId>(v);
  }

  // Highest-sigma monitored node whose count is zero or unknown.
  NodeId frontier = -1;
  for (NodeId v : graph.monitored()) {
    if (visits[static_cast<std::size_t>(v)] > 0) continue;
    if (frontier < 0 || sigma[static_cast<std::size_t>(v)] > sigma[static_cast<std::size_t>(frontier)]) frontier = v;
  }

  const std::size_t agents = observation.agent_positions.size();
  for (int k = 0; k < kNumSlots; ++k) {
    const NodeId node = f.slot_nodes[static_cast<std::size_t>(k)];
    if (node < 0) continue;
    SlotFeatures& s = f.slots[static_cast<std::size_t>(k)];
    const std::int32_t seen = visits[static_cast<std::size_t>(node)];
    const double count = seen < 0 ? 0.0 : static_cast<double>(seen);
    const double sg = sigma[static_cast<std::size_t>(node)];
    const GridPos pos = graph.node(node).grid_pos;
    s.sigma = sg / sigma_max;
    s.discounted = sg / (sigma_max * (count + 1.0));
    s.present = 1.0;
    s.monitored = graph.is_monitored(node) ? 1.0 : 0.0;
    s.unvisited = seen == 0 ? 1.0 : 0.0;
    if (target >= 0) {
      const GridPos tp = graph.node(target).grid_pos;
      s.progress = static_cast<double>(manhattan(here_pos, tp) - manhattan(pos, tp));
    }
    if (frontier >= 0) {
      const GridPos fp = graph.node(frontier).grid_pos;
      s.frontier = static_cast<double>(manhattan(here_pos, fp) - manhattan(pos, fp));
    }
    if (agents > 1) {
      std::size_t near = 0;
      for (std::size_t j = 0; j < agents; ++j) {
        if (static_cast<int>(j) == agent) continue;
        if (chebyshev(graph.node(observation.agent_positions[j]).grid_pos, pos) <= 1) ++near;
      }
      s.crowding = static_cast<double>(near) / static_cast<double>(agents - 1);
    }
  }

  f.frac_unvisited = static_cast<double>(kernels::active().count_nonpositive(visits.data(), m)) / static_cast<double>(m);
  if (agents > 1) {
    int best = -1;
    for (std::size_t j = 0; j < agents; ++j) {
      if (static_cast<int>(j) == agent) continue;
      const int d = chebyshev(graph.node(observation.agent_positions[j]).grid_pos, here_pos);
      if (best < 0 || d < best) best = d;
    }
    f.nearest_agent = static_cast<double>(best) / extent;
  }
  if (target >= 0) f.nearest_target = static_cast<double>(chebyshev(graph.node(target).grid_pos, here_pos)) / extent;
  f.remaining = static_cast<double>(config.horizon - t) / static_cast<double>(config.horizon);
  return f;
}

ActionFeatures action_features(const FeatureVector& f) {
  ActionFeatures rows{};
  for (int k = 0; k < kNumSlots; ++k) {
    const SlotFeatures& s = f.slots[static_cast<std::size_t>(k)];
    if (s.present == 0.0) continue;
    const double stay = k == 0 ? 1.0 : 0.0;
    rows[static_cast<std::size_t>(k)] = {s.discounted,
                                         s.sigma,
                                         s.monitored,
                                         s.unvisited,
                                         s.progress,
                                         s.crowding,
                                         stay,
                                         stay * f.remaining,
                                         stay * f.frac_unvisited,
                                         s.unvisited * s.sigma,
                                         s.frontier};
  }
  return rows;
}

ValueFeatures value_features(const FeatureVector& f) {
  double disc_sum = 0.0;
  int moves = 0;
  for (int k = 1; k < kNumSlots; ++k) {
    const SlotFeatures& s = f.slots[static_cast<std::size_t>(k)];
    if (s.present == 0.0) continue;
    disc_sum += s.discounted;
    ++moves;
  }
  const SlotFeatures& here = f.slots[0];
  return {1.0,
          f.frac_unvisited,
          f.nearest_agent,
          f.nearest_target,
          f.remaining,
          here.discounted,
          here.sigma,
          here.monitored,
          moves > 0 ? disc_sum / moves : 0.0,
          f.remaining * f.remaining};
}

std::string feature_schema() {
  return "v1;slots=stay,up,down,left,right;"
         "action=discounted,sigma,monitored,unvisited,progress,crowding,stay,stay*remaining,stay*frac_unvisited,"
         "unvisited*sigma,frontier;"
         "value=bias,frac_unvisited,nearest_agent,nearest_target,remaining,discounted0,sigma0,monitored0,"
         "mean_move_discounted,remaining^2";
}

std::string feature_schema_hash() { return hex64(fnv1a64(feature_schema())); }

}  // namespace patrol
