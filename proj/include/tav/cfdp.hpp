#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tav/exploration.hpp"
#include "tav/hierarchy.hpp"
#include "tav/model.hpp"

namespace tav {

// One trellis column of the coarse-to-fine search: the active (state, level)
// nodes, kept sorted, always covering the concrete space exactly once.
struct CfdpColumn {
  std::vector<std::pair<std::int32_t, std::int32_t>> nodes;  // (level, state)

  int find(std::int32_t level, std::int32_t state) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), std::make_pair(level, state));
    if (it == nodes.end() || *it != std::make_pair(level, state)) return -1;
    return static_cast<int>(it - nodes.begin());
  }
};

struct CfdpOptions {
  long max_iterations = 1'000'000;
  std::vector<double>* incumbent_trace = nullptr;
  std::function<void(const std::vector<CfdpColumn>&)> on_iteration;
};

// Coarse-to-fine dynamic programming: every time step starts at the coarsest
// level; each iteration finds the optimal path of the current trellis and
// refines every abstract node on it into its children. Link scores between
// nodes at different levels use the max-construction entries of the coarser
// of the two endpoint levels, which keeps them admissible.
inline DecodeResult cfdp_decode(const AbstractModelStack& stack, const AbstractionHierarchy& h,
                                const ObservationSequence& obs, CfdpOptions opts = {},
                                ExplorationRecord* record = nullptr) {
  const int t_max = obs.length();
  if (t_max == 0) throw ValidationError(Err::EmptyObservations, "empty observation sequence");
  check_observations(stack.at(0), obs);

  const auto start = std::chrono::steady_clock::now();
  const int top = h.top_level();

  DecodeResult res;
  std::vector<CfdpColumn> cols(t_max);
  if (record) record->reset(h.level_size(0), t_max);
  long cells = 0;
  for (int t = 1; t <= t_max; ++t) {
    cols[t - 1].nodes.reserve(h.level_size(top));
    for (std::int32_t s = 0; s < h.level_size(top); ++s) {
      cols[t - 1].nodes.emplace_back(top, s);
      if (record) record->touch(t, s, top);
    }
    cells += h.level_size(top);
  }

  // Scratch reused across sweeps.
  std::vector<std::vector<double>> delta(t_max);
  std::vector<std::vector<int>> back(t_max);
  std::vector<std::int32_t> anc_prev, anc_cur;  // ancestor chains, |col| * (top+1)

  auto fill_ancestors = [&](const CfdpColumn& col, std::vector<std::int32_t>& anc) {
    anc.assign(col.nodes.size() * (top + 1), -1);
    for (std::size_t i = 0; i < col.nodes.size(); ++i) {
      auto [lvl, s] = col.nodes[i];
      std::int32_t a = s;
      for (int l = lvl; l <= top; ++l) {
        anc[i * (top + 1) + l] = a;
        if (l < top) a = h.parent(l, a);
      }
    }
  };

  long iterations = 0;
  std::vector<int> path_idx(t_max);
  while (true) {
    if (++iterations > opts.max_iterations)
      throw InternalError(Err::IterationCapExceeded, "no concrete path after " +
                                                         std::to_string(iterations - 1) +
                                                         " iterations");
    // Full forward sweep of the current trellis.
    {
      const CfdpColumn& c0 = cols[0];
      delta[0].resize(c0.nodes.size());
      for (std::size_t i = 0; i < c0.nodes.size(); ++i) {
        auto [lvl, s] = c0.nodes[i];
        delta[0][i] = stack.at(lvl).pi(s) + stack.at(lvl).b(s, obs.at(1));
      }
      fill_ancestors(c0, anc_prev);
    }
    for (int t = 2; t <= t_max; ++t) {
      const CfdpColumn& prev = cols[t - 2];
      const CfdpColumn& cur = cols[t - 1];
      fill_ancestors(cur, anc_cur);
      delta[t - 1].resize(cur.nodes.size());
      back[t - 1].resize(cur.nodes.size());
      const std::int32_t y = obs.at(t);
      for (std::size_t j = 0; j < cur.nodes.size(); ++j) {
        auto [lv, v] = cur.nodes[j];
        double best = kNegInf;
        int arg = -1;
        for (std::size_t i = 0; i < prev.nodes.size(); ++i) {
          const int lu = prev.nodes[i].first;
          const int lc = std::max(lu, static_cast<int>(lv));
          const std::int32_t au = anc_prev[i * (top + 1) + lc];
          const std::int32_t av = anc_cur[j * (top + 1) + lc];
          double cand = delta[t - 2][i] + stack.at(lc).a(au, av);
          if (cand > best) {
            best = cand;
            arg = static_cast<int>(i);
          }
        }
        delta[t - 1][j] = best + stack.at(lv).b(v, y);
        back[t - 1][j] = arg;
      }
      std::swap(anc_prev, anc_cur);
    }

    double best = kNegInf;
    int arg = -1;
    for (std::size_t i = 0; i < cols[t_max - 1].nodes.size(); ++i)
      if (delta[t_max - 1][i] > best) {
        best = delta[t_max - 1][i];
        arg = static_cast<int>(i);
      }
    if (opts.incumbent_trace) opts.incumbent_trace->push_back(best);
    if (best == kNegInf) {
      res.status = DecodeStatus::all_paths_impossible;
      break;
    }
    path_idx[t_max - 1] = arg;
    for (int t = t_max - 1; t >= 1; --t) path_idx[t - 1] = back[t][path_idx[t]];
    if (opts.on_iteration) opts.on_iteration(cols);

    bool all_concrete = true;
    for (int t = 1; t <= t_max; ++t)
      if (cols[t - 1].nodes[path_idx[t - 1]].first != 0) {
        all_concrete = false;
        break;
      }
    if (all_concrete) break;

    // Refine every abstract node on the path by one level.
    for (int t = 1; t <= t_max; ++t) {
      auto [lvl, s] = cols[t - 1].nodes[path_idx[t - 1]];
      if (lvl == 0) continue;
      auto& nodes = cols[t - 1].nodes;
      nodes.erase(nodes.begin() + path_idx[t - 1]);
      for (std::int32_t c : h.children(lvl, s)) {
        auto entry = std::make_pair(lvl - 1, c);
        nodes.insert(std::lower_bound(nodes.begin(), nodes.end(), entry), entry);
        if (record) record->touch(t, c, lvl - 1);
        ++cells;
      }
      res.stats.refinements_spatial += 1;
    }
  }

  if (res.status == DecodeStatus::ok) {
    res.path.resize(t_max);
    for (int t = 1; t <= t_max; ++t) res.path[t - 1] = cols[t - 1].nodes[path_idx[t - 1]].second;
    res.log_likelihood = score_path(stack.at(0), res.path, obs);
  }
  res.stats.iterations = iterations;
  res.stats.cells_explored = cells;
  res.stats.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace tav
