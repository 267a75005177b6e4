#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

#include "tav/scores.hpp"
#include "tav/trellis.hpp"
#include "tav/viterbi.hpp"

namespace tav {

struct TavOptions {
  Heuristic heuristic = Heuristic::cheap;
  int presegments = 0;  // 0 = off; otherwise K equal initial segments
  long max_iterations = 1'000'000;

  // Test instrumentation; all optional and cost nothing when unset.
  std::vector<double>* incumbent_trace = nullptr;
  std::function<void(const WorkingTrellis&, const std::vector<Link>&)> on_best_path;
  std::function<void(const WorkingTrellis&)> on_refinement;
  std::function<void(const Link&)> on_link_created;
};

// Temporally abstracted Viterbi search. One instance per decode; the model
// stack, hierarchy and observations are shared read-only.
class TavSearch {
 public:
  TavSearch(const AbstractModelStack& stack, const AbstractionHierarchy& h,
            const ObservationSequence& obs, TavOptions opts = {},
            ExplorationRecord* record = nullptr)
      : stack_(stack),
        hierarchy_(h),
        obs_(obs),
        opts_(std::move(opts)),
        scorer_(stack, h, obs, opts_.heuristic),
        trellis_(stack, h, obs, record) {
    trellis_.on_link_created = opts_.on_link_created;
  }

  WorkingTrellis& trellis() { return trellis_; }
  const WorkingTrellis& trellis() const { return trellis_; }
  Scorer& scorer() { return scorer_; }
  double last_incumbent() const { return incumbent_; }

  // Seeds the initial graph: top-level states at times 1 and T with the full
  // complement of direct, cross and re-entry links spanning (1, T).
  void init() { seed_segment(1, obs_.length()); }

  // A-priori temporal refinement into K equal segments.
  void presegment_init(int segments) {
    const int t_max = obs_.length();
    if (segments < 2 || segments >= t_max)
      throw ValidationError(Err::BadSegmentCount,
                            "presegments must satisfy 2 <= K < T, got " +
                                std::to_string(segments));
    int prev = 1;
    for (int j = 1; j < segments; ++j) {
      int cut = 1 + static_cast<int>((static_cast<long>(j) * (t_max - 1)) / segments);
      seed_segment(prev, cut);
      prev = cut;
    }
    seed_segment(prev, t_max);
  }

  // Replaces a direct link (span > 1) or any single-step link at level >= 1
  // with the full complement of links between the endpoint children.
  void spatial_refinement(const Link& k) {
    if (k.level == 0)
      throw ValidationError(Err::AlreadyConcrete, "cannot refine concrete link " + k.describe());
    if (k.span() > 1 && k.kind != LinkKind::direct)
      throw InternalError(Err::LinkStructure,
                          "spatial refinement needs a direct or single-step link, got " +
                              k.describe());
    trellis_.remove_link(k);
    const auto& from_children = hierarchy_.children(k.level, k.from);
    const auto& to_children = hierarchy_.children(k.level, k.to);
    for (std::int32_t s : from_children) trellis_.ensure_node(k.level - 1, s, k.t1);
    for (std::int32_t s : to_children) trellis_.ensure_node(k.level - 1, s, k.t2);

    if (k.span() > 1) {
      // from == to here; children partition into stay / leave-and-return /
      // switch-sibling trajectory sets.
      for (std::int32_t s : to_children) {
        add_scored(LinkKind::direct, k.level - 1, s, s, k.t1, k.t2);
        add_scored(LinkKind::reentry, k.level - 1, s, s, k.t1, k.t2);
        for (std::int32_t s2 : from_children)
          if (s2 != s) add_scored(LinkKind::cross, k.level - 1, s2, s, k.t1, k.t2);
      }
    } else {
      for (std::int32_t s : to_children)
        for (std::int32_t s2 : from_children)
          add_scored(s2 == s ? LinkKind::direct : LinkKind::cross, k.level - 1, s2, s, k.t1,
                     k.t2);
    }
    ++refinements_spatial_;
  }

  // Splits every link of the sibling bundle spanning (t1, t2) under `parent`
  // at the interval midpoint, recursing wherever a child's direct link was
  // already refined away so the split replicates through the instantiated
  // subtree. parent = -1 denotes the virtual root; parent_level is the level
  // above the bundle.
  void temporal_refinement(int parent_level, std::int32_t parent, int t1, int t2) {
    if (t2 - t1 <= 1)
      throw ValidationError(Err::SpanTooShort, "temporal refinement needs t2 - t1 > 1");
    const int mid = (t1 + t2 + 1) / 2;
    if (parent >= 0 && trellis_.has_node(parent_level, parent, mid)) return;  // already split
    const int level = parent_level - 1;
    if (level < 0)
      throw InternalError(Err::LinkStructure, "temporal refinement descended below level 0");

    const std::vector<std::int32_t>& members = scope_members(level, parent);
    std::vector<bool> had_direct(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      had_direct[i] = trellis_.has_direct(level, members[i], t1, t2);
      if (!had_direct[i]) temporal_refinement(level, members[i], t1, t2);
    }
    for (std::int32_t s : members) trellis_.ensure_node(level, s, mid);

    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::int32_t s = members[i];
      if (had_direct[i]) {
        Link d;
        d.kind = LinkKind::direct;
        d.level = level;
        d.from = d.to = s;
        d.t1 = t1;
        d.t2 = t2;
        d.scope = parent;
        trellis_.remove_link(d);
        add_scored(LinkKind::direct, level, s, s, t1, mid);
        add_scored(LinkKind::direct, level, s, s, mid, t2);
      }
      // Drop the sibling cross / re-entry links over exactly (t1, t2);
      // incoming links from other intervals survive.
      trellis_.remove_links_if(level, s, t2, [&](const Link& x) {
        return x.kind != LinkKind::direct && x.t1 == t1 && x.scope == parent;
      });
      for (std::int32_t s2 : members) {
        if (s2 == s) {
          if (t2 - mid > 1) add_scored(LinkKind::reentry, level, s, s, mid, t2);
          if (mid - t1 > 1) add_scored(LinkKind::reentry, level, s, s, t1, mid);
        } else {
          add_scored(LinkKind::cross, level, s2, s, mid, t2);
          add_scored(LinkKind::cross, level, s2, s, t1, mid);
        }
      }
    }
    ++refinements_temporal_;
  }

  // Forward sweep over the used times: per time, (1) each node takes its best
  // incoming link, (2) scores flow down the ancestor chain, (3) scores flow
  // back up. Then backtracks the link chain from the best node at T.
  std::vector<Link> best_path() {
    const int t_max = obs_.length();
    const int top = hierarchy_.top_level();
    for (int t : trellis_.used_times()) {
      if (t == 1) continue;
      auto& col = trellis_.column(t);
      for (auto& [key, node] : col) {
        node.covered = !node.in_links.empty();
        double best = kNegInf;
        const Link* best_link = nullptr;
        for (const Link& k : node.in_links) {
          const WorkingTrellis::NodeRec* src = trellis_.find_node(k.level, k.from, k.t1);
          if (!src)
            throw InternalError(Err::LinkStructure, "dangling source for " + k.describe());
          double cand = src->delta + k.score;
          if (cand > best || (best_link && cand == best && link_preferred(k, *best_link))) {
            best = cand;
            best_link = &k;
          }
        }
        node.delta = best;
        if (best_link)
          node.psi = *best_link;
        else
          node.psi.reset();
      }
      // Phase 2: parents hand better bounds down, level L-1 .. 0.
      for (auto it = col.rbegin(); it != col.rend(); ++it) {
        const int level = WorkingTrellis::key_level(it->first);
        if (level >= top) continue;
        const std::int32_t state = WorkingTrellis::key_state(it->first);
        auto pit = col.find(WorkingTrellis::node_key(level + 1, hierarchy_.parent(level, state)));
        if (pit == col.end()) continue;
        it->second.covered = it->second.covered || pit->second.covered;
        if (pit->second.delta > it->second.delta) {
          it->second.delta = pit->second.delta;
          it->second.psi = pit->second.psi;
        }
      }
      for (auto& [key, node] : col)
        if (!node.covered)
          throw InternalError(Err::Disconnected,
                              "node without incoming links at time " + std::to_string(t));
      // Phase 3: children promote better bounds up, level 0 .. L-1.
      for (auto it = col.begin(); it != col.end(); ++it) {
        const int level = WorkingTrellis::key_level(it->first);
        if (level >= top) continue;
        const std::int32_t state = WorkingTrellis::key_state(it->first);
        auto pit = col.find(WorkingTrellis::node_key(level + 1, hierarchy_.parent(level, state)));
        if (pit == col.end()) continue;
        if (pit->second.delta <= it->second.delta) {
          pit->second.delta = it->second.delta;
          pit->second.psi = it->second.psi;
        }
      }
    }

    // Termination step: best used node at T, then follow back-pointers.
    auto& last = trellis_.column(t_max);
    double best = kNegInf;
    const WorkingTrellis::NodeRec* arg = nullptr;
    int arg_level = -1;
    std::int32_t arg_state = -1;
    for (auto& [key, node] : last) {
      if (node.delta > best) {
        best = node.delta;
        arg = &node;
        arg_level = WorkingTrellis::key_level(key);
        arg_state = WorkingTrellis::key_state(key);
      }
    }
    incumbent_ = best;
    std::vector<Link> path;
    if (best == kNegInf) return path;

    int cur_t = t_max;
    int cur_level = arg_level;
    std::int32_t cur_state = arg_state;
    (void)arg;
    while (cur_t > 1) {
      const WorkingTrellis::NodeRec* node = trellis_.find_node(cur_level, cur_state, cur_t);
      if (!node || !node->psi)
        throw InternalError(Err::Disconnected, "backtrack hit a node without a back-pointer at t=" +
                                                   std::to_string(cur_t));
      const Link& k = *node->psi;
      path.push_back(k);
      cur_level = k.level;
      cur_state = k.from;
      cur_t = k.t1;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  DecodeResult decode() {
    const auto start = std::chrono::steady_clock::now();
    const int t_max = obs_.length();
    DecodeResult res;
    if (opts_.presegments != 0)
      presegment_init(opts_.presegments);
    else
      init();

    long iterations = 0;
    std::vector<Link> path;
    while (true) {
      if (++iterations > opts_.max_iterations)
        throw InternalError(Err::IterationCapExceeded,
                            "no concrete path after " + std::to_string(iterations - 1) +
                                " iterations");
      path = best_path();
      if (opts_.incumbent_trace) opts_.incumbent_trace->push_back(incumbent_);
      if (opts_.on_best_path) opts_.on_best_path(trellis_, path);
      if (incumbent_ == kNegInf) {
        res.status = DecodeStatus::all_paths_impossible;
        break;
      }
      bool all_concrete = true;
      for (const Link& k : path)
        if (!k.is_concrete()) {
          all_concrete = false;
          break;
        }
      if (all_concrete) break;
      for (const Link& k : path) {
        if (k.is_concrete()) continue;
        if (k.kind == LinkKind::direct || k.span() == 1)
          spatial_refinement(k);
        else
          temporal_refinement(k.level + 1, k.scope, k.t1, k.t2);
        if (opts_.on_refinement) opts_.on_refinement(trellis_);
      }
    }

    if (res.status == DecodeStatus::ok) {
      res.path.assign(t_max, 0);
      res.path[path.front().t1 - 1] = path.front().from;
      for (const Link& k : path) {
        if (k.kind == LinkKind::direct) {
          for (int t = k.t1; t <= k.t2; ++t) res.path[t - 1] = k.from;
        } else {
          res.path[k.t2 - 1] = k.to;
        }
      }
      res.log_likelihood = score_path(stack_.at(0), res.path, obs_);
    }
    res.stats.iterations = iterations;
    res.stats.links_created = trellis_.links_created();
    res.stats.cells_explored = trellis_.cells_explored();
    res.stats.refinements_spatial = refinements_spatial_;
    res.stats.refinements_temporal = refinements_temporal_;
    res.stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return res;
  }

 private:
  const std::vector<std::int32_t>& scope_members(int level, std::int32_t scope_state) {
    if (scope_state < 0) {
      if (top_members_.empty())
        for (std::int32_t s = 0; s < hierarchy_.level_size(hierarchy_.top_level()); ++s)
          top_members_.push_back(s);
      return top_members_;
    }
    return hierarchy_.children(level + 1, scope_state);
  }

  void add_scored(LinkKind kind, int level, std::int32_t from, std::int32_t to, int t1, int t2) {
    Link k;
    k.kind = kind;
    k.level = level;
    k.from = from;
    k.to = to;
    k.t1 = t1;
    k.t2 = t2;
    k.scope = level == hierarchy_.top_level() ? -1 : hierarchy_.parent(level, from);
    k.score = scorer_.score_link(k);
    trellis_.add_link(k);
  }

  // Full top-level complement over one segment: a direct link per state and
  // a cross (or re-entry, when the span allows one) link per ordered pair.
  void seed_segment(int ta, int tb) {
    const int top = hierarchy_.top_level();
    const int n_top = hierarchy_.level_size(top);
    for (std::int32_t s = 0; s < n_top; ++s) {
      trellis_.ensure_node(top, s, ta);
      trellis_.ensure_node(top, s, tb);
    }
    for (std::int32_t s = 0; s < n_top; ++s) {
      add_scored(LinkKind::direct, top, s, s, ta, tb);
      for (std::int32_t s2 = 0; s2 < n_top; ++s2) {
        if (s2 != s)
          add_scored(LinkKind::cross, top, s2, s, ta, tb);
        else if (tb - ta > 1)
          add_scored(LinkKind::reentry, top, s, s, ta, tb);
      }
    }
  }

  const AbstractModelStack& stack_;
  const AbstractionHierarchy& hierarchy_;
  const ObservationSequence& obs_;
  TavOptions opts_;
  Scorer scorer_;
  WorkingTrellis trellis_;
  std::vector<std::int32_t> top_members_;
  double incumbent_ = kNegInf;
  long refinements_spatial_ = 0;
  long refinements_temporal_ = 0;
};

// Decodes with the temporally abstracted search; the result equals
// viterbi_decode's likelihood on the concrete model.
inline DecodeResult tav_decode(const AbstractModelStack& stack, const AbstractionHierarchy& h,
                               const ObservationSequence& obs, TavOptions opts = {},
                               ExplorationRecord* record = nullptr) {
  const int t_max = obs.length();
  if (t_max == 0) throw ValidationError(Err::EmptyObservations, "empty observation sequence");
  check_observations(stack.at(0), obs);
  if (opts.presegments < 0 || (opts.presegments != 0 && opts.presegments >= t_max))
    throw ValidationError(Err::BadSegmentCount, "presegments must satisfy K < T");
  if (t_max == 1) {
    // No links are possible over a single step; the decode is a plain argmax
    // over concrete states.
    return viterbi_decode(stack.at(0), obs, record);
  }
  TavSearch search(stack, h, obs, std::move(opts), record);
  return search.decode();
}

}  // namespace tav
