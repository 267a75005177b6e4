#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tav/hierarchy.hpp"
#include "tav/model.hpp"

namespace tav {

// Which (state, level) nodes a decode instantiated, per time step. The total
// entry count equals DecodeResult.stats.cells_explored.
struct ExplorationRecord {
  int num_states = 0;  // concrete N_0
  // touched[t-1] lists (state, level) instantiations at time t.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> touched;

  int horizon() const { return static_cast<int>(touched.size()); }

  void reset(int n0, int t_max) {
    num_states = n0;
    touched.assign(t_max, {});
  }

  void touch(int t, std::int32_t state, std::int32_t level) {
    touched[static_cast<std::size_t>(t) - 1].emplace_back(state, level);
  }

  long total_cells() const {
    long n = 0;
    for (const auto& col : touched) n += static_cast<long>(col.size());
    return n;
  }

  // Number of map cells covered at concrete resolution.
  long concrete_cells() const {
    long n = 0;
    for (const auto& col : touched)
      for (const auto& [s, l] : col)
        if (l == 0) ++n;
    return n;
  }
};

namespace detail {

// Smallest instantiated level covering each concrete state, per column;
// -1 where untouched.
inline std::vector<std::vector<int>> coverage_grid(const ExplorationRecord& rec,
                                                   const AbstractionHierarchy& h) {
  const int t_max = rec.horizon();
  std::vector<std::vector<int>> grid(t_max, std::vector<int>(rec.num_states, -1));
  for (int t = 1; t <= t_max; ++t) {
    for (const auto& [s, l] : rec.touched[t - 1]) {
      if (l == 0) {
        int& cell = grid[t - 1][s];
        if (cell < 0 || cell > 0) cell = 0;
        continue;
      }
      for (std::int32_t d : h.descendants(l, s)) {
        int& cell = grid[t - 1][d];
        if (cell < 0 || cell > l) cell = l;
      }
    }
  }
  return grid;
}

inline void check_render_inputs(const ExplorationRecord& rec, const AbstractionHierarchy& h,
                                const DecodeResult& result) {
  if (h.level_size(0) != rec.num_states)
    throw ValidationError(Err::Mismatch, "hierarchy and record disagree on num_states");
  if (result.status == DecodeStatus::ok &&
      static_cast<int>(result.path.size()) != rec.horizon())
    throw ValidationError(Err::Mismatch, "path length differs from record horizon");
  for (std::int32_t s : result.path)
    if (s < 0 || s >= rec.num_states)
      throw ValidationError(Err::Mismatch, "path state out of range");
}

}  // namespace detail

// Text grid, one row per concrete state, one column per time step.
// '.' untouched, digit = smallest covering level, '*' = optimal trajectory.
inline std::string render_exploration_map(const ExplorationRecord& rec,
                                          const AbstractionHierarchy& h,
                                          const DecodeResult& result) {
  detail::check_render_inputs(rec, h, result);
  auto grid = detail::coverage_grid(rec, h);
  const int t_max = rec.horizon();
  std::string out;
  out.reserve(static_cast<std::size_t>(rec.num_states) * (t_max + 1));
  for (int s = 0; s < rec.num_states; ++s) {
    for (int t = 1; t <= t_max; ++t) {
      if (result.status == DecodeStatus::ok && result.path[t - 1] == s) {
        out += '*';
        continue;
      }
      int l = grid[t - 1][s];
      if (l < 0)
        out += '.';
      else if (l < 10)
        out += static_cast<char>('0' + l);
      else
        out += static_cast<char>('a' + (l - 10));
    }
    out += '\n';
  }
  return out;
}

// Same content as a portable graymap (P2). Untouched cells are white, finer
// coverage is darker, the optimal trajectory is black.
inline std::string render_exploration_pgm(const ExplorationRecord& rec,
                                          const AbstractionHierarchy& h,
                                          const DecodeResult& result) {
  detail::check_render_inputs(rec, h, result);
  auto grid = detail::coverage_grid(rec, h);
  const int t_max = rec.horizon();
  const int top = h.top_level();
  std::string out = "P2\n" + std::to_string(t_max) + " " + std::to_string(rec.num_states) +
                    "\n255\n";
  for (int s = 0; s < rec.num_states; ++s) {
    for (int t = 1; t <= t_max; ++t) {
      int v;
      if (result.status == DecodeStatus::ok && result.path[t - 1] == s) {
        v = 0;
      } else {
        int l = grid[t - 1][s];
        v = l < 0 ? 255 : 40 + (top > 0 ? l * 180 / top : 0);
      }
      out += std::to_string(v);
      out += t == t_max ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace tav
