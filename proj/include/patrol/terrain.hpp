#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace patrol {

using NodeId = std::int32_t;

struct GridPos {
  int row = 0;
  int col = 0;
  bool operator==(const GridPos&) const = default;
};

inline int chebyshev(GridPos a, GridPos b) {
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr > dc ? dr : dc;
}

struct Cell {
  bool has_road = false;
  std::int64_t crime_count = 0;
  // false marks auxiliary padding: traversable but never monitored.
  bool in_zone = true;
  bool operator==(const Cell&) const = default;
};

struct GridMap {
  int rows = 0;
  int cols = 0;
  double cell_side_m = 50.0;
  std::vector<Cell> cells;  // row-major

  const Cell& at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col]; }
  Cell& at(int row, int col) { return cells[static_cast<std::size_t>(row) * cols + col]; }

  bool operator==(const GridMap&) const = default;
};

// Throws kInvariantViolation naming the first broken GridMap invariant.
void validate(const GridMap& grid);

struct Node {
  NodeId id = 0;
  GridPos grid_pos;
  double sigma = 0.0;
  bool in_zone = true;
};

// Undirected patrol graph. Immutable after construction; ids are dense and
// follow row-major cell order.
class PatrolGraph {
 public:
  PatrolGraph() = default;
  PatrolGraph(int rows, int cols, std::vector<Node> nodes, std::vector<std::vector<NodeId>> adjacency);

  std::size_t size() const { return nodes_.size(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::span<const Node> nodes() const { return nodes_; }
  // Sorted ascending.
  std::span<const NodeId> neighbors(NodeId id) const { return adjacency_[static_cast<std::size_t>(id)]; }
  std::span<const NodeId> monitored() const { return monitored_; }
  bool is_monitored(NodeId id) const { return monitored_flag_[static_cast<std::size_t>(id)] != 0; }
  std::span<const double> sigma() const { return sigma_; }
  std::size_t edge_count() const { return edge_count_; }

  // Node at a grid cell, or -1 when the cell has no road.
  NodeId node_at(GridPos pos) const;
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }

  // Struct-of-arrays grid coordinates for the vectorized visibility kernel.
  std::span<const std::int32_t> node_rows() const { return node_rows_; }
  std::span<const std::int32_t> node_cols() const { return node_cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<NodeId> monitored_;
  std::vector<std::uint8_t> monitored_flag_;
  std::vector<double> sigma_;
  std::vector<NodeId> cell_to_node_;
  std::vector<std::int32_t> node_rows_;
  std::vector<std::int32_t> node_cols_;
  std::size_t edge_count_ = 0;
};

struct Diagnostic {
  std::string kind;
  std::string message;
};

// One node per road cell, 4-neighbour edges, monitored = in-zone road cells.
// A monitored set split into several components is reported through
// `diagnostics` (kind "DisconnectedMonitoredSet") rather than as an error.
PatrolGraph skeletonize(const GridMap& grid, std::vector<Diagnostic>* diagnostics = nullptr);

// Connected components of the subgraph induced by the monitored set, each
// sorted ascending, ordered by smallest member.
std::vector<std::vector<NodeId>> monitored_components(const PatrolGraph& graph);

// Number of connected components of the whole graph.
std::size_t component_count(const PatrolGraph& graph);

// Hop distance; std::nullopt when b is unreachable from a.
std::optional<int> shortest_distance(const PatrolGraph& graph, NodeId a, NodeId b);

// Hop distances from `source` to every node, -1 for unreachable ones.
std::vector<int> distances_from(const PatrolGraph& graph, NodeId source);

// Monitored nodes by sigma descending, ties by ascending id.
std::vector<NodeId> rank_monitored(const PatrolGraph& graph);

struct SyntheticSpec {
  int rows = 20;
  int cols = 20;
  int hotspots = 3;
  std::int64_t peak_min = 20;
  std::int64_t peak_max = 60;
  double road_density = 0.8;
  int decay_radius = 4;
  // Width of the auxiliary (out-of-zone) ring around the surveillance area.
  int aux_border = 1;
  double cell_side_m = 50.0;
};

// Deterministic for a fixed (spec, seed). Crime decays with Chebyshev distance
// from `hotspots` separated peaks, and road cells always form one component.
GridMap generate_synthetic_map(const SyntheticSpec& spec, std::uint64_t seed);

// Grid positions of the hotspot peaks the generator would place for (spec, seed).
std::vector<GridPos> synthetic_peaks(const SyntheticSpec& spec, std::uint64_t seed);

GridMap load_map(const std::filesystem::path& path);
void save_map(const GridMap& grid, const std::filesystem::path& path);
GridMap parse_map(const std::string& text);
std::string serialize_map(const GridMap& grid);

}  // namespace patrol
