#include <algorithm>
#include <cstdlib>
#include <deque>

#include "patrol/error.hpp"
#include "patrol/rng.hpp"
#include "patrol/terrain.hpp"

namespace patrol {

namespace {

void check_spec(const SyntheticSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) throw Error(ErrorCode::kInvalidSpec, "rows and cols must be positive");
  if (spec.hotspots < 0) throw Error(ErrorCode::kInvalidSpec, "hotspot count must be non-negative");
  if (spec.peak_min < 1 || spec.peak_min > spec.peak_max) {
    throw Error(ErrorCode::kInvalidSpec, "peak range must be non-empty with peak_min >= 1");
  }
  if (!(spec.road_density > 0.0 && spec.road_density <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "road density must lie in (0, 1]");
  }
  if (spec.decay_radius < 0) throw Error(ErrorCode::kInvalidSpec, "decay radius must be non-negative");
  if (spec.aux_border < 0) throw Error(ErrorCode::kInvalidSpec, "aux border must be non-negative");
  if (!(spec.cell_side_m > 0.0)) throw Error(ErrorCode::kInvalidSpec, "cell side must be positive");
}

bool zone_has_interior(const SyntheticSpec& spec) {
  return spec.rows > 2 * spec.aux_border && spec.cols > 2 * spec.aux_border;
}

bool in_zone(const SyntheticSpec& spec, int r, int c) {
  if (!zone_has_interior(spec)) return true;
  const int b = spec.aux_border;
  return r >= b && r < spec.rows - b && c >= b && c < spec.cols - b;
}

struct Peak {
  GridPos pos;
  std::int64_t height = 0;
};

// Peaks are kept at least radius+2 apart so each stays a strict local maximum.
std::vector<Peak> place_peaks(const SyntheticSpec& spec, Rng& rng) {
  int r0 = 0, r1 = spec.rows, c0 = 0, c1 = spec.cols;
  if (zone_has_interior(spec)) {
    r0 = c0 = spec.aux_border;
    r1 = spec.rows - spec.aux_border;
    c1 = spec.cols - spec.aux_border;
  }
  const int separation = spec.decay_radius + 2;
  // Greedy sequential placement can paint itself into a corner, so a failed
  // round starts over with fresh draws.
  constexpr int kRounds = 200;
  constexpr int kAttempts = 1000;
  std::vector<Peak> peaks;
  for (int round = 0; round < kRounds; ++round) {
    peaks.clear();
    for (int h = 0; h < spec.hotspots; ++h) {
      bool placed = false;
      for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
        const GridPos p{static_cast<int>(rng.uniform_int(r0, r1 - 1)), static_cast<int>(rng.uniform_int(c0, c1 - 1))};
        const bool clear = std::all_of(peaks.begin(), peaks.end(),
                                       [&](const Peak& q) { return chebyshev(p, q.pos) >= separation; });
        if (clear) {
          peaks.push_back({p, rng.uniform_int(spec.peak_min, spec.peak_max)});
          placed = true;
        }
      }
      if (!placed) break;
    }
    if (static_cast<int>(peaks.size()) == spec.hotspots) return peaks;
  }
  throw Error(ErrorCode::kInvalidSpec, "cannot place " + std::to_string(spec.hotspots) + " hotspots separated by " +
                                           std::to_string(separation) + " cells on this grid");
}

// Road components under 4-connectivity, each listed by cell index.
std::vector<std::vector<std::size_t>> road_components(const GridMap& grid) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::uint8_t> seen(grid.cells.size(), 0);
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (std::size_t s = 0; s < grid.cells.size(); ++s) {
    if (seen[s] || !grid.cells[s].has_road) continue;
    std::vector<std::size_t> comp;
    std::deque<std::size_t> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      const int r = static_cast<int>(u) / grid.cols;
      const int c = static_cast<int>(u) % grid.cols;
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k];
        const int nc = c + dc[k];
        if (nr < 0 || nr >= grid.rows || nc < 0 || nc >= grid.cols) continue;
        const auto v = static_cast<std::size_t>(nr) * grid.cols + nc;
        if (!seen[v] && grid.cells[v].has_road) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Carves an L-shaped corridor (vertical leg first) between two cells.
void carve(GridMap& grid, std::size_t from, std::size_t to) {
  int r = static_cast<int>(from) / grid.cols;
  int c = static_cast<int>(from) % grid.cols;
  const int tr = static_cast<int>(to) / grid.cols;
  const int tc = static_cast<int>(to) % grid.cols;
  grid.at(r, c).has_road = true;
  while (r != tr) {
    r += tr > r ? 1 : -1;
    grid.at(r, c).has_road = true;
  }
  while (c != tc) {
    c += tc > c ? 1 : -1;
    grid.at(r, c).has_road = true;
  }
}

void connect_roads(GridMap& grid) {
  for (;;) {
    const auto comps = road_components(grid);
    if (comps.size() <= 1) return;
    const auto& main = comps[0];
    const auto& other = comps[1];
    // Closest pair by Manhattan distance, first found wins.
    std::size_t best_from = other[0], best_to = main[0];
    int best = -1;
    for (std::size_t a : other) {
      const int ar = static_cast<int>(a) / grid.cols, ac = static_cast<int>(a) % grid.cols;
      for (std::size_t b : main) {
        const int d = std::abs(ar - static_cast<int>(b) / grid.cols) + std::abs(ac - static_cast<int>(b) % grid.cols);
        if (best < 0 || d < best) {
          best = d;
          best_from = a;
          best_to = b;
        }
      }
    }
    carve(grid, best_from, best_to);
  }
}

}  // namespace

std::vector<GridPos> synthetic_peaks(const SyntheticSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);
  std::vector<GridPos> out;
  for (const Peak& p : place_peaks(spec, rng)) out.push_back(p.pos);
  return out;
}

GridMap generate_synthetic_map(const SyntheticSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);
  const auto peaks = place_peaks(spec, rng);

  GridMap grid;
  grid.rows = spec.rows;
  grid.cols = spec.cols;
  grid.cell_side_m = spec.cell_side_m;
  grid.cells.resize(static_cast<std::size_t>(spec.rows) * spec.cols);

  const std::int64_t span = spec.decay_radius + 1;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      Cell& cell = grid.at(r, c);
      cell.in_zone = in_zone(spec, r, c);
      std::int64_t crime = 0;
      for (const Peak& p : peaks) {
        const int d = chebyshev({r, c}, p.pos);
        if (d > spec.decay_radius) continue;
        crime = std::max(crime, p.height * (span - d) / span);
      }
      cell.crime_count = crime;
      cell.has_road = spec.road_density >= 1.0 || rng.uniform01() < spec.road_density;
    }
  }
  for (const Peak& p : peaks) grid.at(p.pos.row, p.pos.col).has_road = true;
  const bool any_road = std::any_of(grid.cells.begin(), grid.cells.end(), [](const Cell& c) { return c.has_road; });
  if (!any_road) grid.at(spec.rows / 2, spec.cols / 2).has_road = true;
  connect_roads(grid);
  return grid;
}

}  // namespace patrol
