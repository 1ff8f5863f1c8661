#pragma once

// Reference computations written straight from the definitions, sharing no
// code with the library beyond plain data types.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "patrol/env.hpp"
#include "patrol/terrain.hpp"

namespace oracle {

// Road cells of a grid in row-major order: the id a node should carry.
inline std::vector<std::pair<int, int>> road_cells(const patrol::GridMap& g) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (g.cells[static_cast<std::size_t>(r * g.cols + c)].has_road) out.emplace_back(r, c);
    }
  }
  return out;
}

// All-pairs BFS on the raster itself (4-neighbour road cells). -1 = unreachable.
inline std::vector<std::vector<int>> grid_all_pairs(const patrol::GridMap& g) {
  const auto cells = road_cells(g);
  std::vector<int> id_of(static_cast<std::size_t>(g.rows * g.cols), -1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    id_of[static_cast<std::size_t>(cells[i].first * g.cols + cells[i].second)] = static_cast<int>(i);
  }
  std::vector<std::vector<int>> dist(cells.size(), std::vector<int>(cells.size(), -1));
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (std::size_t s = 0; s < cells.size(); ++s) {
    std::deque<int> queue{static_cast<int>(s)};
    dist[s][s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      const auto [r, c] = cells[static_cast<std::size_t>(u)];
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k], nc = c + dc[k];
        if (nr < 0 || nc < 0 || nr >= g.rows || nc >= g.cols) continue;
        const int v = id_of[static_cast<std::size_t>(nr * g.cols + nc)];
        if (v < 0 || dist[s][static_cast<std::size_t>(v)] >= 0) continue;
        dist[s][static_cast<std::size_t>(v)] = dist[s][static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Coverage by brute force: sort C by (sigma desc, id asc), take the
// ceil(psi|C|/100) prefix, intersect with every node seen in the routes.
inline double coverage(const std::vector<double>& sigma, const std::vector<int>& monitored,
                       const std::vector<std::vector<int>>& routes, int psi_percent) {
  std::vector<std::pair<double, int>> ranked;
  for (int v : monitored) ranked.emplace_back(-sigma[static_cast<std::size_t>(v)], v);
  std::sort(ranked.begin(), ranked.end());
  long long z = (static_cast<long long>(psi_percent) * static_cast<long long>(ranked.size()) + 99) / 100;
  z = std::clamp<long long>(z, 1, static_cast<long long>(ranked.size()));
  std::set<int> visited;
  for (const auto& route : routes) visited.insert(route.begin(), route.end());
  long long hit = 0;
  for (long long i = 0; i < z; ++i) hit += visited.count(ranked[static_cast<std::size_t>(i)].second);
  return static_cast<double>(hit) / static_cast<double>(z);
}

// Eq. 5 / Eq. 6 evaluated directly for an agent whose post-arrival count is `visits`.
inline double individual(const patrol::RewardParams& p, bool in_c, double sigma, int visits) {
  if (!in_c) return p.nu;
  const double base = sigma / (p.eta * visits);
  const double tau = visits != 1 ? 0.0 : (sigma >= p.phi ? p.alpha_plus : p.alpha_minus);
  return base >= 1.0 ? base + tau : base + tau + p.nu / 2.0;
}

}  // namespace oracle

namespace fixture {

// All-road lattice, every cell in zone, crime from `crime` (row-major) or 0.
inline patrol::GridMap lattice(int rows, int cols, std::vector<std::int64_t> crime = {}) {
  patrol::GridMap g;
  g.rows = rows;
  g.cols = cols;
  g.cells.resize(static_cast<std::size_t>(rows * cols));
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    g.cells[i].has_road = true;
    g.cells[i].crime_count = crime.empty() ? 0 : crime[i];
  }
  return g;
}

// '#' road in zone, 'a' road outside the zone, '.' no road; digits after a
// '#' are not supported, crime comes from the separate vector.
inline patrol::GridMap from_rows(const std::vector<std::string>& rows, std::vector<std::int64_t> crime = {}) {
  patrol::GridMap g;
  g.rows = static_cast<int>(rows.size());
  g.cols = static_cast<int>(rows.front().size());
  for (const auto& line : rows) {
    for (char ch : line) {
      patrol::Cell cell;
      cell.has_road = ch != '.';
      cell.in_zone = ch != 'a';
      g.cells.push_back(cell);
    }
  }
  for (std::size_t i = 0; i < crime.size(); ++i) g.cells[i].crime_count = crime[i];
  return g;
}

}  // namespace fixture
