#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tav/exploration.hpp"
#include "tav/hierarchy.hpp"
#include "tav/model.hpp"

namespace tav {

enum class LinkKind : std::uint8_t { direct, cross, reentry };

inline const char* kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::direct: return "direct";
    case LinkKind::cross: return "cross";
    case LinkKind::reentry: return "reentry";
  }
  return "?";
}

// Temporally abstract link ((from, t1), (to, t2)) between two states at the
// same abstraction level. scope is the shared parent whose descendants
// confine intermediate states (-1 = virtual root above the top level).
struct Link {
  LinkKind kind = LinkKind::direct;
  std::int32_t level = 0;
  std::int32_t from = 0;
  std::int32_t to = 0;
  std::int32_t t1 = 0;
  std::int32_t t2 = 0;
  std::int32_t scope = -1;
  double score = kNegInf;

  int span() const { return t2 - t1; }

  // A fully specified path segment: a constant run or a single concrete step.
  bool is_concrete() const {
    return level == 0 && (kind == LinkKind::direct || span() == 1);
  }

  bool same_identity(const Link& o) const {
    return kind == o.kind && level == o.level && from == o.from && to == o.to && t1 == o.t1 &&
           t2 == o.t2;
  }

  std::string describe() const {
    return std::string(kind_name(kind)) + " L" + std::to_string(level) + " (" +
           std::to_string(from) + "," + std::to_string(t1) + ")->(" + std::to_string(to) + "," +
           std::to_string(t2) + ")";
  }
};

// Deterministic preference among equally scored links: direct first, then by
// source state and start time.
inline bool link_preferred(const Link& a, const Link& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  if (a.level != b.level) return a.level < b.level;
  if (a.from != b.from) return a.from < b.from;
  return a.t1 < b.t1;
}

// Mutable search state of the temporally abstracted search: sparse used
// times, per-time (state, level) nodes, incoming-link adjacency and the
// delta / psi tables the sweeps fill in.
class WorkingTrellis {
 public:
  struct NodeRec {
    double delta = kNegInf;
    std::optional<Link> psi;
    std::vector<Link> in_links;
    bool covered = false;
  };

  using NodeKey = std::uint64_t;
  using Column = std::map<NodeKey, NodeRec>;

  static NodeKey node_key(int level, std::int32_t state) {
    return (static_cast<std::uint64_t>(level) << 32) | static_cast<std::uint32_t>(state);
  }
  static int key_level(NodeKey k) { return static_cast<int>(k >> 32); }
  static std::int32_t key_state(NodeKey k) { return static_cast<std::int32_t>(k & 0xffffffffu); }

  WorkingTrellis(const AbstractModelStack& stack, const AbstractionHierarchy& h,
                 const ObservationSequence& obs, ExplorationRecord* record = nullptr)
      : stack_(stack), hierarchy_(h), obs_(obs), record_(record) {
    if (record_) record_->reset(h.level_size(0), obs.length());
  }

  const std::set<int>& used_times() const { return used_times_; }
  int horizon() const { return obs_.length(); }

  Column& column(int t) { return columns_[t]; }
  const Column* find_column(int t) const {
    auto it = columns_.find(t);
    return it == columns_.end() ? nullptr : &it->second;
  }
  const std::map<int, Column>& columns() const { return columns_; }

  bool has_node(int level, std::int32_t state, int t) const {
    const Column* col = find_column(t);
    return col && col->count(node_key(level, state)) > 0;
  }

  NodeRec* find_node(int level, std::int32_t state, int t) {
    auto cit = columns_.find(t);
    if (cit == columns_.end()) return nullptr;
    auto nit = cit->second.find(node_key(level, state));
    return nit == cit->second.end() ? nullptr : &nit->second;
  }
  const NodeRec* find_node(int level, std::int32_t state, int t) const {
    return const_cast<WorkingTrellis*>(this)->find_node(level, state, t);
  }

  // Creates the node if needed. Nodes at t = 1 get their delta from the
  // node's own level right away since the sweep never revisits time 1; the
  // own-level initialization is the tighter admissible choice.
  NodeRec& ensure_node(int level, std::int32_t state, int t) {
    used_times_.insert(t);
    auto [it, inserted] = columns_[t].try_emplace(node_key(level, state));
    if (inserted) {
      ++cells_explored_;
      if (record_) record_->touch(t, state, level);
      if (t == 1) {
        const LogModel& m = stack_.at(level);
        it->second.delta = m.pi(state) + m.b(state, obs_.at(1));
        it->second.covered = true;
      }
    }
    return it->second;
  }

  // Inserts a scored link, enforcing the structural rules every link must
  // satisfy. Re-inserting an identical link is a no-op so that replayed
  // refinements stay idempotent.
  void add_link(const Link& k) {
    check_structure(k);
    ensure_node(k.level, k.from, k.t1);
    NodeRec& dst = ensure_node(k.level, k.to, k.t2);
    for (const Link& existing : dst.in_links)
      if (existing.same_identity(k)) return;
    dst.in_links.push_back(k);
    ++links_created_;
    if (on_link_created) on_link_created(k);
  }

  // Removes a link by identity; the link must exist.
  void remove_link(const Link& k) {
    NodeRec* dst = find_node(k.level, k.to, k.t2);
    if (dst) {
      for (auto it = dst->in_links.begin(); it != dst->in_links.end(); ++it) {
        if (it->same_identity(k)) {
          dst->in_links.erase(it);
          return;
        }
      }
    }
    throw InternalError(Err::LinkStructure, "removing absent link " + k.describe());
  }

  // Removes all incoming links of (state, t2) matching pred; absent matches
  // are fine (idempotent replays).
  template <typename Pred>
  void remove_links_if(int level, std::int32_t state, int t2, Pred pred) {
    NodeRec* dst = find_node(level, state, t2);
    if (!dst) return;
    std::erase_if(dst->in_links, pred);
  }

  bool has_direct(int level, std::int32_t state, int t1, int t2) const {
    const NodeRec* dst = find_node(level, state, t2);
    if (!dst) return false;
    for (const Link& k : dst->in_links)
      if (k.kind == LinkKind::direct && k.level == level && k.from == state && k.t1 == t1)
        return true;
    return false;
  }

  long links_created() const { return links_created_; }
  long cells_explored() const { return cells_explored_; }

  const AbstractionHierarchy& hierarchy() const { return hierarchy_; }
  const AbstractModelStack& stack() const { return stack_; }
  const ObservationSequence& observations() const { return obs_; }

  std::function<void(const Link&)> on_link_created;

 private:
  void check_structure(const Link& k) const {
    const int top = hierarchy_.top_level();
    if (k.level < 0 || k.level > top)
      throw InternalError(Err::LinkStructure, "bad level on " + k.describe());
    if (k.t2 <= k.t1) throw InternalError(Err::LinkStructure, "t2 <= t1 on " + k.describe());
    const int n = hierarchy_.level_size(k.level);
    if (k.from < 0 || k.from >= n || k.to < 0 || k.to >= n)
      throw InternalError(Err::LinkStructure, "state out of range on " + k.describe());
    switch (k.kind) {
      case LinkKind::direct:
        if (k.from != k.to)
          throw InternalError(Err::LinkStructure, "direct link with from != to: " + k.describe());
        break;
      case LinkKind::reentry:
        if (k.from != k.to || k.span() <= 1)
          throw InternalError(Err::LinkStructure, "bad re-entry link: " + k.describe());
        break;
      case LinkKind::cross:
        if (k.span() > 1 && k.from == k.to)
          throw InternalError(Err::LinkStructure,
                              "multi-step cross link with from == to: " + k.describe());
        break;
    }
    const std::int32_t expect_scope =
        k.level == top ? -1 : hierarchy_.parent(k.level, k.from);
    if (k.scope != expect_scope)
      throw InternalError(Err::LinkStructure, "scope mismatch on " + k.describe());
    if (k.span() > 1 && k.level < top) {
      // Same parent at the next level implies the same parent at every
      // coarser level.
      if (hierarchy_.parent(k.level, k.from) != hierarchy_.parent(k.level, k.to))
        throw InternalError(Err::LinkStructure,
                            "multi-step link across parents: " + k.describe());
    }
  }

  const AbstractModelStack& stack_;
  const AbstractionHierarchy& hierarchy_;
  const ObservationSequence& obs_;
  ExplorationRecord* record_;

  std::set<int> used_times_;
  std::map<int, Column> columns_;
  long links_created_ = 0;
  long cells_explored_ = 0;
};

}  // namespace tav
