#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tav/hierarchy.hpp"
#include "tav/model.hpp"
#include "tav/trellis.hpp"

namespace tav {

enum class Heuristic { cheap, viterbi };

// Admissible link scoring with per-decode caches: emission-log prefix sums
// per (level, state), sibling-set transition maxima per scope, and lazily
// extended restricted-Viterbi tables. Not safe to share across threads; each
// decode owns one.
class Scorer {
 public:
  Scorer(const AbstractModelStack& stack, const AbstractionHierarchy& h,
         const ObservationSequence& obs, Heuristic heuristic = Heuristic::cheap)
      : stack_(stack), hierarchy_(h), obs_(obs), heuristic_(heuristic) {}

  Heuristic heuristic() const { return heuristic_; }

  // Exact single-step edge at a level (admissible for level > 0, exact at 0).
  double score_edge(int level, std::int32_t s1, std::int32_t s2, int t2) const {
    const LogModel& m = stack_.at(level);
    return m.a(s1, s2) + m.b(s2, obs_.at(t2));
  }

  // Direct link: (t2-t1) self-transitions plus the observations in (t1, t2].
  // After the first query on a (level, state) pair any sub-interval is O(1).
  double score_direct(int level, std::int32_t s, int t1, int t2) {
    const LogModel& m = stack_.at(level);
    const double self = m.a(s, s);
    if (self == kNegInf) return kNegInf;
    return scaled_log(t2 - t1, self) + state_prefix(level, s).range(t1, t2);
  }

  // Cheap cross / re-entry bound: best exit transition, best interior
  // transition to the power span-2, best entry transition, and the best
  // sibling emission at every covered observation.
  double score_cross_cheap(const Link& k) {
    const ScopeCache& sc = scope(k.level, k.scope);
    const int i = sc.pos(k.from);
    const int j = sc.pos(k.to);
    double out = sc.row_max[i];
    double in = sc.col_max[j];
    if (out == kNegInf || in == kNegInf) return kNegInf;
    const long middle = k.span() - 2;
    double mid = scaled_log(middle, sc.all_max);
    double obs_part = sc.obs_max.range(k.t1, k.t2);
    return out + mid + in + obs_part;
  }

  // Restricted-Viterbi bound: the exact optimum over sibling-typed
  // trajectories from k.from to k.to within the scope. Always at least as
  // tight as the cheap bound.
  double score_link_viterbi(const Link& k) {
    const ScopeCache& sc = scope(k.level, k.scope);
    const int c = static_cast<int>(sc.members.size());
    VitTable& table = vit_table(k.level, k.scope, k.from, k.t1, sc);
    while (table.last_t < k.t2) extend_vit(table, sc, k.level);
    return table.rows[static_cast<std::size_t>(k.t2 - k.t1 - 1) * c + sc.pos(k.to)];
  }

  // Scores any link per its kind, span and the configured heuristic.
  double score_link(const Link& k) {
    if (k.span() == 1) return score_edge(k.level, k.from, k.to, k.t2);
    if (k.kind == LinkKind::direct) return score_direct(k.level, k.from, k.t1, k.t2);
    return heuristic_ == Heuristic::cheap ? score_cross_cheap(k) : score_link_viterbi(k);
  }

 private:
  // Prefix sums over t of per-step log terms, with -inf terms tracked
  // separately so range queries stay exact.
  struct PrefixRow {
    std::vector<double> sum;                // sum[t], finite terms only
    std::vector<std::uint32_t> inf_count;   // empty when no -inf occurs

    double range(int t1, int t2) const {
      if (!inf_count.empty() && inf_count[t2] - inf_count[t1] > 0) return kNegInf;
      return sum[t2] - sum[t1];
    }
  };

  template <typename TermFn>
  PrefixRow build_prefix(TermFn term) const {
    const int t_max = obs_.length();
    PrefixRow row;
    row.sum.resize(t_max + 1);
    std::vector<std::uint32_t> cnt(t_max + 1, 0);
    row.sum[0] = 0.0;
    bool has_inf = false;
    for (int t = 1; t <= t_max; ++t) {
      double v = term(t);
      if (v == kNegInf) {
        has_inf = true;
        row.sum[t] = row.sum[t - 1];
        cnt[t] = cnt[t - 1] + 1;
      } else {
        row.sum[t] = row.sum[t - 1] + v;
        cnt[t] = cnt[t - 1];
      }
    }
    if (has_inf) row.inf_count = std::move(cnt);
    return row;
  }

  PrefixRow& state_prefix(int level, std::int32_t s) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(level) << 32) | static_cast<std::uint32_t>(s);
    auto it = state_prefix_.find(key);
    if (it == state_prefix_.end()) {
      const LogModel& m = stack_.at(level);
      it = state_prefix_.emplace(key, build_prefix([&](int t) { return m.b(s, obs_.at(t)); }))
               .first;
    }
    return it->second;
  }

  struct ScopeCache {
    std::vector<std::int32_t> members;  // sibling set at the link level
    std::vector<double> row_max;        // max over members of a(member_i, .)
    std::vector<double> col_max;        // max over members of a(., member_j)
    double all_max = kNegInf;
    PrefixRow obs_max;                  // prefix of max-member emission logs

    int pos(std::int32_t state) const {
      for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i] == state) return static_cast<int>(i);
      throw InternalError(Err::LinkStructure, "state not in its link scope");
    }
  };

  const ScopeCache& scope(int level, std::int32_t scope_state) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(level) << 40) | static_cast<std::uint32_t>(scope_state);
    auto it = scopes_.find(key);
    if (it != scopes_.end()) return it->second;

    ScopeCache sc;
    if (scope_state < 0) {
      sc.members.resize(hierarchy_.level_size(level));
      for (std::int32_t s = 0; s < static_cast<std::int32_t>(sc.members.size()); ++s)
        sc.members[s] = s;
    } else {
      sc.members = hierarchy_.children(level + 1, scope_state);
    }
    const LogModel& m = stack_.at(level);
    const int c = static_cast<int>(sc.members.size());
    sc.row_max.assign(c, kNegInf);
    sc.col_max.assign(c, kNegInf);
    for (int i = 0; i < c; ++i) {
      for (int j = 0; j < c; ++j) {
        double v = m.a(sc.members[i], sc.members[j]);
        sc.row_max[i] = std::max(sc.row_max[i], v);
        sc.col_max[j] = std::max(sc.col_max[j], v);
        sc.all_max = std::max(sc.all_max, v);
      }
    }
    sc.obs_max = build_prefix([&](int t) {
      double best = kNegInf;
      for (std::int32_t s : sc.members) best = std::max(best, m.b(s, obs_.at(t)));
      return best;
    });
    return scopes_.emplace(key, std::move(sc)).first->second;
  }

  // Forward restricted-Viterbi rows from (src, t1), extended on demand so
  // temporal splits that share a start reuse earlier work.
  struct VitTable {
    int t1 = 0;
    int last_t = 0;                // largest time with a row
    std::vector<double> base;      // values at t1 (0 at src, -inf elsewhere)
    std::vector<double> rows;      // row r = values at time t1 + 1 + r
  };

  VitTable& vit_table(int level, std::int32_t scope_state, std::int32_t src, int t1,
                      const ScopeCache& sc) {
    const std::uint64_t key = (static_cast<std::uint64_t>(level) << 56) |
                              (static_cast<std::uint64_t>(static_cast<std::uint32_t>(src)) << 32) |
                              static_cast<std::uint32_t>(t1);
    auto it = vit_.find(key);
    if (it == vit_.end()) {
      VitTable table;
      table.t1 = t1;
      table.last_t = t1;
      table.base.assign(sc.members.size(), kNegInf);
      table.base[sc.pos(src)] = 0.0;
      it = vit_.emplace(key, std::move(table)).first;
    }
    return it->second;
  }

  void extend_vit(VitTable& table, const ScopeCache& sc, int level) {
    const LogModel& m = stack_.at(level);
    const int c = static_cast<int>(sc.members.size());
    const int t = table.last_t + 1;
    const double* prev = table.last_t == table.t1
                             ? table.base.data()
                             : table.rows.data() + static_cast<std::size_t>(table.last_t -
                                                                            table.t1 - 1) * c;
    table.rows.resize(table.rows.size() + c);
    double* cur = table.rows.data() + static_cast<std::size_t>(t - table.t1 - 1) * c;
    const std::int32_t y = obs_.at(t);
    for (int q = 0; q < c; ++q) {
      double best = kNegInf;
      for (int p = 0; p < c; ++p) {
        double cand = prev[p] + m.a(sc.members[p], sc.members[q]);
        if (cand > best) best = cand;
      }
      cur[q] = best + m.b(sc.members[q], y);
    }
    table.last_t = t;
  }

  const AbstractModelStack& stack_;
  const AbstractionHierarchy& hierarchy_;
  const ObservationSequence& obs_;
  Heuristic heuristic_;

  std::unordered_map<std::uint64_t, PrefixRow> state_prefix_;
  std::unordered_map<std::uint64_t, ScopeCache> scopes_;
  std::unordered_map<std::uint64_t, VitTable> vit_;
};

}  // namespace tav
