#pragma once

// Enumeration oracles: exhaustive trajectory sets for links, chain counting
// for the partition property and a concrete forward table for the
// upper-bound property. All intentionally brute force and independent of the
// search implementation they check.

#include <functional>
#include <map>
#include <vector>

#include "tav/tavhmm.hpp"

namespace tav::test {

class TrajectoryOracle {
 public:
  TrajectoryOracle(const LogModel& concrete, const AbstractionHierarchy& h,
                   const ObservationSequence& obs)
      : model_(concrete), h_(h), obs_(obs) {}

  bool in_desc(int level, std::int32_t abstract_state, std::int32_t concrete_state) const {
    return h_.ancestor(concrete_state, 0, level) == abstract_state;
  }

  bool in_scope(const Link& k, std::int32_t concrete_state) const {
    if (k.scope < 0) return true;
    return h_.ancestor(concrete_state, 0, k.level + 1) == k.scope;
  }

  // xs holds the concrete states at times k.t1 .. k.t2.
  bool link_represents(const Link& k, const std::vector<std::int32_t>& xs) const {
    const int span = k.span();
    if (static_cast<int>(xs.size()) != span + 1) return false;
    switch (k.kind) {
      case LinkKind::direct:
        for (std::int32_t x : xs)
          if (!in_desc(k.level, k.from, x)) return false;
        return true;
      case LinkKind::cross: {
        if (!in_desc(k.level, k.from, xs.front()) || !in_desc(k.level, k.to, xs.back()))
          return false;
        for (int i = 1; i < span; ++i)
          if (!in_scope(k, xs[i])) return false;
        return true;
      }
      case LinkKind::reentry: {
        if (!in_desc(k.level, k.from, xs.front()) || !in_desc(k.level, k.from, xs.back()))
          return false;
        bool left = false;
        for (int i = 1; i < span; ++i) {
          if (!in_scope(k, xs[i])) return false;
          if (!in_desc(k.level, k.from, xs[i])) left = true;
        }
        return left;
      }
    }
    return false;
  }

  // Log-probability of the transitions and observations a link accounts for:
  // steps t1 -> t1+1 .. t2-1 -> t2 and observations Y_{t1+1} .. Y_{t2}.
  double segment_logprob(const std::vector<std::int32_t>& xs, int t1) const {
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      acc += model_.a(xs[i - 1], xs[i]);
      acc += model_.b(xs[i], obs_.at(t1 + static_cast<int>(i)));
    }
    return acc;
  }

  // Enumerates every concrete trajectory the link represents.
  void for_each_trajectory(const Link& k,
                           const std::function<void(const std::vector<std::int32_t>&)>& fn) const {
    const int n0 = h_.level_size(0);
    std::vector<std::int32_t> xs(k.span() + 1);
    std::function<void(int)> rec = [&](int i) {
      if (i == static_cast<int>(xs.size())) {
        if (link_represents(k, xs)) fn(xs);
        return;
      }
      for (std::int32_t x = 0; x < n0; ++x) {
        xs[i] = x;
        rec(i + 1);
      }
    };
    rec(0);
  }

  // Largest trajectory log-probability the link must upper-bound; kNegInf if
  // the link represents nothing.
  double max_trajectory_logprob(const Link& k) const {
    double best = kNegInf;
    for_each_trajectory(k, [&](const std::vector<std::int32_t>& xs) {
      best = std::max(best, segment_logprob(xs, k.t1));
    });
    return best;
  }

 private:
  const LogModel& model_;
  const AbstractionHierarchy& h_;
  const ObservationSequence& obs_;
};

// Number of link chains in the working graph that represent the full
// concrete trajectory xs (xs[0] is the state at time 1). The partition
// property requires exactly one for every trajectory.
inline long count_representing_chains(const WorkingTrellis& g, const AbstractionHierarchy& h,
                                      const LogModel& concrete, const ObservationSequence& obs,
                                      const std::vector<std::int32_t>& xs) {
  TrajectoryOracle oracle(concrete, h, obs);
  const int t_max = obs.length();
  // Outgoing adjacency: links grouped by start time.
  std::multimap<int, const Link*> by_start;
  for (const auto& [t, col] : g.columns())
    for (const auto& [key, node] : col)
      for (const Link& k : node.in_links) by_start.emplace(k.t1, &k);

  std::map<int, long> memo;
  std::function<long(int)> count = [&](int t) -> long {
    if (t == t_max) return 1;
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    long total = 0;
    auto [lo, hi] = by_start.equal_range(t);
    for (auto iter = lo; iter != hi; ++iter) {
      const Link& k = *iter->second;
      std::vector<std::int32_t> seg(xs.begin() + (k.t1 - 1), xs.begin() + k.t2);
      if (oracle.link_represents(k, seg)) total += count(k.t2);
    }
    memo[t] = total;
    return total;
  };
  return count(1);
}

// Concrete forward table: delta[t][x] = best log-probability over prefixes
// ending in state x at time t. Independent implementation of the recursion
// used as the upper-bound oracle.
inline std::vector<std::vector<double>> forward_delta(const LogModel& m,
                                                      const ObservationSequence& obs) {
  const int n = m.num_states;
  const int t_max = obs.length();
  std::vector<std::vector<double>> delta(t_max + 1, std::vector<double>(n, kNegInf));
  for (int x = 0; x < n; ++x) delta[1][x] = m.pi(x) + m.b(x, obs.at(1));
  for (int t = 2; t <= t_max; ++t)
    for (int y = 0; y < n; ++y) {
      double best = kNegInf;
      for (int x = 0; x < n; ++x) best = std::max(best, delta[t - 1][x] + m.a(x, y));
      delta[t][y] = best + m.b(y, obs.at(t));
    }
  return delta;
}

}  // namespace tav::test
