#include "patrol/terrain.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "patrol/error.hpp"

namespace patrol {

void validate(const GridMap& grid) {
  if (grid.rows <= 0 || grid.cols <= 0) {
    throw Error(ErrorCode::kInvariantViolation, "rows and cols must be positive");
  }
  if (static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols) != grid.cells.size()) {
    throw Error(ErrorCode::kInvariantViolation, "rows*cols must equal the number of cells");
  }
  if (!(grid.cell_side_m > 0.0)) {
    throw Error(ErrorCode::kInvariantViolation, "cell_side_m must be positive");
  }
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    if (grid.cells[i].crime_count < 0) {
      throw Error(ErrorCode::kInvariantViolation,
                  "crime_count must be non-negative (cell " + std::to_string(i) + ")");
    }
  }
}

PatrolGraph::PatrolGraph(int rows, int cols, std::vector<Node> nodes, std::vector<std::vector<NodeId>> adjacency)
    : rows_(rows), cols_(cols), nodes_(std::move(nodes)), adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != nodes_.size()) {
    throw Error(ErrorCode::kInvariantViolation, "adjacency size does not match node count");
  }
  cell_to_node_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), -1);
  monitored_flag_.assign(nodes_.size(), 0);
  sigma_.reserve(nodes_.size());
  node_rows_.reserve(nodes_.size());
  node_cols_.reserve(nodes_.size());
  std::size_t degree_sum = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != static_cast<NodeId>(i)) throw Error(ErrorCode::kInvariantViolation, "node ids must be dense");
    if (n.grid_pos.row < 0 || n.grid_pos.row >= rows_ || n.grid_pos.col < 0 || n.grid_pos.col >= cols_) {
      throw Error(ErrorCode::kInvariantViolation, "node grid position out of range");
    }
    if (n.sigma < 0.0) throw Error(ErrorCode::kInvariantViolation, "sigma must be non-negative");
    cell_to_node_[static_cast<std::size_t>(n.grid_pos.row) * cols_ + n.grid_pos.col] = n.id;
    sigma_.push_back(n.sigma);
    node_rows_.push_back(n.grid_pos.row);
    node_cols_.push_back(n.grid_pos.col);
    if (n.in_zone) {
      monitored_.push_back(n.id);
      monitored_flag_[i] = 1;
    }
    auto& adj = adjacency_[i];
    std::sort(adj.begin(), adj.end());
    degree_sum += adj.size();
  }
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (NodeId j : adjacency_[i]) {
      if (!contains(j) || j == static_cast<NodeId>(i)) {
        throw Error(ErrorCode::kInvariantViolation, "adjacency references an invalid node or a self-loop");
      }
      const auto& back = adjacency_[static_cast<std::size_t>(j)];
      if (!std::binary_search(back.begin(), back.end(), static_cast<NodeId>(i))) {
        throw Error(ErrorCode::kInvariantViolation, "adjacency must be symmetric");
      }
    }
  }
  edge_count_ = degree_sum / 2;
}

NodeId PatrolGraph::node_at(GridPos pos) const {
  if (pos.row < 0 || pos.row >= rows_ || pos.col < 0 || pos.col >= cols_) return -1;
  return cell_to_node_[static_cast<std::size_t>(pos.row) * cols_ + pos.col];
}

PatrolGraph skeletonize(const GridMap& grid, std::vector<Diagnostic>* diagnostics) {
  validate(grid);
  std::vector<NodeId> ids(grid.cells.size(), -1);
  std::vector<Node> nodes;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const Cell& cell = grid.at(r, c);
      if (!cell.has_road) continue;
      const auto id = static_cast<NodeId>(nodes.size());
      ids[static_cast<std::size_t>(r) * grid.cols + c] = id;
      nodes.push_back(Node{id, {r, c}, static_cast<double>(cell.crime_count), cell.in_zone});
    }
  }
  if (nodes.empty()) throw Error(ErrorCode::kEmptyGraph, "no cell has a road");

  std::vector<std::vector<NodeId>> adjacency(nodes.size());
  for (const Node& n : nodes) {
    const int r = n.grid_pos.row;
    const int c = n.grid_pos.col;
    // Right and down only; each edge is recorded from both ends.
    if (c + 1 < grid.cols) {
      const NodeId other = ids[static_cast<std::size_t>(r) * grid.cols + c + 1];
      if (other >= 0) {
        adjacency[n.id].push_back(other);
        adjacency[other].push_back(n.id);
      }
    }
    if (r + 1 < grid.rows) {
      const NodeId other = ids[static_cast<std::size_t>(r + 1) * grid.cols + c];
      if (other >= 0) {
        adjacency[n.id].push_back(other);
        adjacency[other].push_back(n.id);
      }
    }
  }
  PatrolGraph graph(grid.rows, grid.cols, std::move(nodes), std::move(adjacency));

  if (diagnostics != nullptr) {
    const auto components = monitored_components(graph);
    if (components.size() > 1) {
      std::ostringstream msg;
      msg << "monitored set has " << components.size() << " components:";
      for (const auto& comp : components) {
        msg << " {";
        for (std::size_t i = 0; i < comp.size(); ++i) msg << (i ? "," : "") << comp[i];
        msg << "}";
      }
      diagnostics->push_back({"DisconnectedMonitoredSet", msg.str()});
    }
  }
  return graph;
}

namespace {

// Labels components reachable through nodes accepted by `keep`.
template <typename Keep>
std::vector<std::vector<NodeId>> components_of(const PatrolGraph& graph, Keep keep) {
  std::vector<std::vector<NodeId>> out;
  std::vector<std::uint8_t> seen(graph.size(), 0);
  std::deque<NodeId> queue;
  for (std::size_t s = 0; s < graph.size(); ++s) {
    const auto start = static_cast<NodeId>(s);
    if (seen[s] || !keep(start)) continue;
    std::vector<NodeId> comp;
    seen[s] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (NodeId v : graph.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)] && keep(v)) {
          seen[static_cast<std::size_t>(v)] = 1;
          queue.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::vector<std::vector<NodeId>> monitored_components(const PatrolGraph& graph) {
  return components_of(graph, [&](NodeId v) { return graph.is_monitored(v); });
}

std::size_t component_count(const PatrolGraph& graph) {
  return components_of(graph, [](NodeId) { return true; }).size();
}

std::vector<int> distances_from(const PatrolGraph& graph, NodeId source) {
  if (!graph.contains(source)) throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(source));
  std::vector<int> dist(graph.size(), -1);
  std::deque<NodeId> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const int next = dist[static_cast<std::size_t>(u)] + 1;
    for (NodeId v : graph.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = next;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<int> shortest_distance(const PatrolGraph& graph, NodeId a, NodeId b) {
  if (!graph.contains(a)) throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(a));
  if (!graph.contains(b)) throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(b));
  if (a == b) return 0;
  // Early-exit BFS from a.
  std::vector<int> dist(graph.size(), -1);
  std::deque<NodeId> queue{a};
  dist[static_cast<std::size_t>(a)] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const int next = dist[static_cast<std::size_t>(u)] + 1;
    for (NodeId v : graph.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] >= 0) continue;
      if (v == b) return next;
      dist[static_cast<std::size_t>(v)] = next;
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

std::vector<NodeId> rank_monitored(const PatrolGraph& graph) {
  std::vector<NodeId> ranking(graph.monitored().begin(), graph.monitored().end());
  std::stable_sort(ranking.begin(), ranking.end(), [&](NodeId x, NodeId y) {
    const double sx = graph.node(x).sigma;
    const double sy = graph.node(y).sigma;
    if (sx != sy) return sx > sy;
    return x < y;
  });
  return ranking;
}

}  // namespace patrol
