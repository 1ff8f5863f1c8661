#include "patrol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "patrol/error.hpp"

namespace patrol {

std::size_t top_psi_count(std::size_t monitored, double psi) {
  if (!(psi > 0.0 && psi <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "psi must lie in (0, 100]");
  }
  if (monitored == 0) throw Error(ErrorCode::kEmptyMonitoredSet, "no monitored nodes");
  const double raw = std::ceil(psi * static_cast<double>(monitored) / 100.0);
  const auto count = static_cast<std::size_t>(raw);
  return std::clamp<std::size_t>(count, 1, monitored);
}

std::vector<NodeId> top_psi_set(const HotspotRanking& ranking, double psi) {
  const std::size_t k = top_psi_count(ranking.size(), psi);
  return {ranking.order().begin(), ranking.order().begin() + static_cast<std::ptrdiff_t>(k)};
}

namespace {

void check_episode(const PatrolGraph& graph, const EpisodeLog& episode) {
  if (episode.num_nodes != graph.size()) {
    throw Error(ErrorCode::kMixedGraphs, "episode recorded on a graph with " + std::to_string(episode.num_nodes) +
                                             " nodes, evaluating on " + std::to_string(graph.size()));
  }
  for (const auto& route : episode.routes) {
    for (NodeId v : route) {
      if (!graph.contains(v)) throw Error(ErrorCode::kMixedGraphs, "node id " + std::to_string(v) + " out of range");
    }
  }
}

void mark_visited(const EpisodeLog& episode, std::vector<std::uint8_t>& visited) {
  for (const auto& route : episode.routes) {
    for (NodeId v : route) visited[static_cast<std::size_t>(v)] = 1;
  }
}

double covered_fraction(const PatrolGraph& graph, const std::vector<std::uint8_t>& visited, double psi) {
  const auto z = top_psi_set(HotspotRanking(graph), psi);
  std::size_t hit = 0;
  for (NodeId v : z) hit += visited[static_cast<std::size_t>(v)];
  return static_cast<double>(hit) / static_cast<double>(z.size());
}

}  // namespace

double coverage_index(const PatrolGraph& graph, const EpisodeLog& episode, double psi) {
  check_episode(graph, episode);
  std::vector<std::uint8_t> visited(graph.size(), 0);
  mark_visited(episode, visited);
  return covered_fraction(graph, visited, psi);
}

double pooled_coverage_index(const PatrolGraph& graph, std::span<const EpisodeLog> episodes, double psi) {
  std::vector<std::uint8_t> visited(graph.size(), 0);
  for (const auto& e : episodes) {
    check_episode(graph, e);
    mark_visited(e, visited);
  }
  return covered_fraction(graph, visited, psi);
}

double route_entropy(std::span<const EpisodeLog> episodes) {
  if (episodes.empty()) return 0.0;
  const int horizon = episodes.front().horizon;
  const std::size_t agents = episodes.front().routes.size();
  for (const auto& e : episodes) {
    if (e.horizon != horizon || e.routes.size() != agents) {
      throw Error(ErrorCode::kInvalidArgument, "episodes must share horizon and agent count");
    }
    for (const auto& r : e.routes) {
      if (r.size() != static_cast<std::size_t>(horizon) + 1) {
        throw Error(ErrorCode::kInvalidArgument, "route length must be horizon + 1");
      }
    }
  }
  const double total = static_cast<double>(episodes.size());
  double sum = 0.0;
  std::vector<NodeId> joint(agents);
  for (int t = 0; t <= horizon; ++t) {
    // Ordered map: the summation order depends only on the outcomes, which
    // makes the result invariant to the order of the episodes.
    std::map<std::vector<NodeId>, std::size_t> counts;
    for (const auto& e : episodes) {
      for (std::size_t a = 0; a < agents; ++a) joint[a] = e.routes[a][static_cast<std::size_t>(t)];
      ++counts[joint];
    }
    double h = 0.0;
    for (const auto& [outcome, count] : counts) {
      const double p = static_cast<double>(count) / total;
      h -= p * std::log(p);
    }
    sum += h;
  }
  return sum / static_cast<double>(horizon + 1);
}

double CoverageReport::coverage_at(double psi) const {
  for (std::size_t i = 0; i < psi_values.size(); ++i) {
    if (psi_values[i] == psi) return coverage[i];
  }
  throw Error(ErrorCode::kInvalidArgument, "psi " + std::to_string(psi) + " not in report");
}

CoverageReport batch_evaluate(const PatrolGraph& graph, std::span<const EpisodeLog> episodes,
                              std::span<const double> psi_values, bool pooled) {
  if (episodes.empty()) throw Error(ErrorCode::kInvalidArgument, "no episodes to evaluate");
  CoverageReport report;
  report.psi_values.assign(psi_values.begin(), psi_values.end());
  report.num_runs = episodes.size();
  report.pooled = pooled;
  report.config_hash = episodes.front().config_hash;
  for (double psi : psi_values) {
    if (pooled) {
      report.coverage.push_back(pooled_coverage_index(graph, episodes, psi));
      continue;
    }
    double sum = 0.0;
    for (const auto& e : episodes) sum += coverage_index(graph, e, psi);
    report.coverage.push_back(sum / static_cast<double>(episodes.size()));
  }
  report.entropy = route_entropy(episodes);
  return report;
}

}  // namespace patrol
