#include "patrol/baselines.hpp"

#include "patrol/error.hpp"

namespace patrol {

double GreedyPolicy::score(const DecisionContext& ctx, NodeId node) const {
  const double sigma = ctx.observation.target_values[static_cast<std::size_t>(node)];
  if (score_ == GreedyScore::kRaw) return sigma;
  // Reachable nodes lie within distance 1 and line_of_sight >= 1, so the
  // count is never masked here.
  const std::int32_t seen = ctx.observation.visible_visits[static_cast<std::size_t>(node)];
  const double visits = seen < 0 ? 0.0 : static_cast<double>(seen);
  return sigma / (ctx.config.reward.eta * (visits + 1.0));
}

Action GreedyPolicy::act(const DecisionContext& ctx, Rng& /*rng*/) {
  if (ctx.legal.empty()) throw Error(ErrorCode::kInvalidArgument, "empty legal action set");
  const NodeId here = ctx.observation.agent_positions[static_cast<std::size_t>(ctx.agent)];
  const Action* best = nullptr;
  double best_score = 0.0;
  NodeId best_node = -1;
  for (const Action& a : ctx.legal) {
    const NodeId dest = a.destination(here);
    const double s = score(ctx, dest);
    if (best == nullptr || s > best_score || (s == best_score && dest < best_node)) {
      best = &a;
      best_score = s;
      best_node = dest;
    }
  }
  return *best;
}

Action RandomPolicy::act(const DecisionContext& ctx, Rng& rng) {
  if (ctx.legal.empty()) throw Error(ErrorCode::kInvalidArgument, "empty legal action set");
  return ctx.legal[static_cast<std::size_t>(rng.uniform_index(ctx.legal.size()))];
}

std::unique_ptr<Policy> greedy_policy(GreedyScore score) { return std::make_unique<GreedyPolicy>(score); }

std::unique_ptr<Policy> random_policy() { return std::make_unique<RandomPolicy>(); }

}  // namespace patrol
