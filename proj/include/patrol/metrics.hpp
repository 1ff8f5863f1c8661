#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "patrol/env.hpp"

namespace patrol {

inline const std::vector<double> kDefaultPsi{3.0, 5.0, 10.0, 20.0};

// Monitored nodes ordered by sigma descending, ties by ascending id.
class HotspotRanking {
 public:
  explicit HotspotRanking(const PatrolGraph& graph) : order_(rank_monitored(graph)) {}
  std::span<const NodeId> order() const { return order_; }
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<NodeId> order_;
};

// Number of nodes in the top-psi set: ceil(psi * |C| / 100), at least 1.
std::size_t top_psi_count(std::size_t monitored, double psi);

// First top_psi_count nodes of the ranking.
std::vector<NodeId> top_psi_set(const HotspotRanking& ranking, double psi);

// |Z ∩ visited| / |Z| with Z the top-psi set and visited every node that
// appears in any route of the episode, start positions included.
double coverage_index(const PatrolGraph& graph, const EpisodeLog& episode, double psi);

// Same ratio with visited pooled over all episodes.
double pooled_coverage_index(const PatrolGraph& graph, std::span<const EpisodeLog> episodes, double psi);

// Mean over time steps of the Shannon entropy (nats) of the joint
// configuration (position of every agent slot) across episodes.
double route_entropy(std::span<const EpisodeLog> episodes);

struct CoverageReport {
  std::vector<double> psi_values;
  std::vector<double> coverage;  // parallel to psi_values
  double entropy = 0.0;
  std::size_t num_runs = 0;
  bool pooled = false;
  std::string config_hash;

  double coverage_at(double psi) const;
  bool operator==(const CoverageReport&) const = default;
};

CoverageReport batch_evaluate(const PatrolGraph& graph, std::span<const EpisodeLog> episodes,
                              std::span<const double> psi_values = kDefaultPsi, bool pooled = false);

std::string serialize_report(const CoverageReport& report);
CoverageReport parse_report(const std::string& text);
void save_report(const CoverageReport& report, const std::filesystem::path& path);
CoverageReport load_report(const std::filesystem::path& path);

// One row of the comparison table (line of sight, start mode, patrols,
// |W_psi|..., entropy), tab separated.
struct TableRow {
  std::string policy;
  int line_of_sight = 0;
  StartMode start_mode = StartMode::kRandom;
  int patrols = 0;
  std::vector<double> coverage;
  double entropy = 0.0;
  bool operator==(const TableRow&) const = default;
};

struct Table {
  std::vector<double> psi_values;
  std::vector<TableRow> rows;
  bool operator==(const Table&) const = default;
};

TableRow make_row(const std::string& policy, const EnvConfig& config, const CoverageReport& report);

// Coverage printed with 3 decimals and entropy with 2, so a parsed table
// re-emits byte-identically.
std::string format_table(const Table& table);
Table parse_table(const std::string& text);

}  // namespace patrol
