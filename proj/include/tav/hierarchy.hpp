#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tav/model.hpp"

namespace tav {

// State-space abstraction hierarchy. Level 0 is the concrete space, level L
// the coarsest. parent_map(l) sends each level-l state to its level-(l+1)
// parent; levels strictly coarsen.
class AbstractionHierarchy {
 public:
  AbstractionHierarchy() = default;

  AbstractionHierarchy(std::vector<std::int32_t> level_sizes,
                       std::vector<std::vector<std::int32_t>> parent_maps)
      : level_sizes_(std::move(level_sizes)), parent_maps_(std::move(parent_maps)) {
    build_derived();
  }

  // Trivial single-level hierarchy (L = 0) over n states.
  static AbstractionHierarchy flat(int n) {
    return AbstractionHierarchy({n}, {});
  }

  int num_levels() const { return static_cast<int>(level_sizes_.size()); }  // L + 1
  int top_level() const { return num_levels() - 1; }                        // L
  int level_size(int l) const { return level_sizes_[l]; }
  const std::vector<std::int32_t>& level_sizes() const { return level_sizes_; }
  const std::vector<std::vector<std::int32_t>>& parent_maps() const { return parent_maps_; }

  std::int32_t parent(int level, std::int32_t s) const { return parent_maps_[level][s]; }

  // Children (at level-1) of a level >= 1 state.
  const std::vector<std::int32_t>& children(int level, std::int32_t s) const {
    return children_[level - 1][s];
  }

  // Ancestor of a level-`from` state at level `to` >= from.
  std::int32_t ancestor(std::int32_t s, int from, int to) const {
    for (int l = from; l < to; ++l) s = parent_maps_[l][s];
    return s;
  }

  // Concrete (level-0) descendants of a state at any level.
  std::vector<std::int32_t> descendants(int level, std::int32_t s) const {
    std::vector<std::int32_t> cur{s};
    for (int l = level; l >= 1; --l) {
      std::vector<std::int32_t> next;
      for (std::int32_t u : cur) {
        const auto& c = children(l, u);
        next.insert(next.end(), c.begin(), c.end());
      }
      cur = std::move(next);
    }
    return cur;
  }

 private:
  void build_derived() {
    children_.clear();
    children_.resize(parent_maps_.size());
    for (std::size_t l = 0; l < parent_maps_.size(); ++l) {
      children_[l].resize(level_sizes_[l + 1]);
      for (std::int32_t s = 0; s < static_cast<std::int32_t>(parent_maps_[l].size()); ++s) {
        std::int32_t p = parent_maps_[l][s];
        if (p >= 0 && p < level_sizes_[l + 1]) children_[l][p].push_back(s);
      }
    }
  }

  std::vector<std::int32_t> level_sizes_;                 // N_0..N_L
  std::vector<std::vector<std::int32_t>> parent_maps_;    // [l][state] -> parent, l in 0..L-1
  std::vector<std::vector<std::vector<std::int32_t>>> children_;  // [l-1][state at l] -> children
};

// Accepts iff all structural invariants hold and the concrete level matches
// the model's state count.
inline void validate_hierarchy(const AbstractionHierarchy& h, int num_states) {
  const auto& sizes = h.level_sizes();
  if (sizes.empty()) throw ValidationError(Err::SizeMismatch, "hierarchy has no levels");
  if (sizes[0] != num_states)
    throw ValidationError(Err::SizeMismatch, "level 0 has " + std::to_string(sizes[0]) +
                                                 " states, model has " + std::to_string(num_states));
  if (h.parent_maps().size() != sizes.size() - 1)
    throw ValidationError(Err::SizeMismatch, "parent map count does not match level count");
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    if (sizes[l + 1] < 1) throw ValidationError(Err::SizeMismatch, "empty level");
    if (sizes[l + 1] >= sizes[l])
      throw ValidationError(Err::NotCoarsening, "level " + std::to_string(l + 1) +
                                                    " does not strictly coarsen level " +
                                                    std::to_string(l));
    const auto& pm = h.parent_maps()[l];
    if (pm.size() != static_cast<std::size_t>(sizes[l]))
      throw ValidationError(Err::SizeMismatch, "parent map " + std::to_string(l) + " wrong length");
    std::vector<int> child_count(sizes[l + 1], 0);
    for (std::int32_t p : pm) {
      if (p < 0 || p >= sizes[l + 1])
        throw ValidationError(Err::OrphanParent, "parent index " + std::to_string(p) +
                                                     " out of range at level " + std::to_string(l));
      ++child_count[p];
    }
    for (std::int32_t p = 0; p < sizes[l + 1]; ++p)
      if (child_count[p] == 0)
        throw ValidationError(Err::OrphanParent, "level " + std::to_string(l + 1) + " state " +
                                                     std::to_string(p) + " has no children");
  }
}

// Per-level log-space models M_0..M_L. Entry l+1 is the entrywise maximum of
// level l over children pairs, so every abstract entry upper-bounds all of
// its concrete constituents.
struct AbstractModelStack {
  std::vector<LogModel> models;  // index = level

  const LogModel& at(int level) const { return models[level]; }
  int num_levels() const { return static_cast<int>(models.size()); }
};

inline AbstractModelStack build_abstract_models(const LogModel& model,
                                                const AbstractionHierarchy& h) {
  validate_hierarchy(h, model.num_states);
  AbstractModelStack stack;
  stack.models.reserve(h.num_levels());
  stack.models.push_back(model);
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    const LogModel& fine = stack.models[l];
    const auto& pm = h.parent_maps()[l];
    LogModel coarse;
    coarse.num_states = h.level_size(l + 1);
    coarse.num_symbols = fine.num_symbols;
    coarse.log_transition.assign(static_cast<std::size_t>(coarse.num_states) * coarse.num_states,
                                 kNegInf);
    coarse.log_emission.assign(static_cast<std::size_t>(coarse.num_states) * coarse.num_symbols,
                               kNegInf);
    coarse.log_initial.assign(coarse.num_states, kNegInf);
    for (int p = 0; p < fine.num_states; ++p) {
      const std::int32_t pp = pm[p];
      for (int q = 0; q < fine.num_states; ++q) {
        const std::int32_t pq = pm[q];
        double& slot =
            coarse.log_transition[static_cast<std::size_t>(pp) * coarse.num_states + pq];
        slot = std::max(slot, fine.a(p, q));
      }
      for (int k = 0; k < fine.num_symbols; ++k) {
        double& slot = coarse.log_emission[static_cast<std::size_t>(pp) * coarse.num_symbols + k];
        slot = std::max(slot, fine.b(p, k));
      }
      coarse.log_initial[pp] = std::max(coarse.log_initial[pp], fine.pi(p));
    }
    stack.models.push_back(std::move(coarse));
  }
  return stack;
}

// Generator parameters for a dynamic Bayesian network instance with
// timescale separation. cardinalities[0] belongs to the fastest variable;
// the slowest variable is the most significant digit of the state encoding.
struct DbnSpec {
  int num_vars = 0;
  std::vector<int> cardinalities;  // fastest first, each >= 2
  double epsilon = 0.0;            // timescale ratio in (0,1)
  std::uint64_t seed = 0;

  void validate() const {
    if (num_vars < 1) throw ValidationError(Err::OutOfRange, "num_vars must be >= 1");
    if (static_cast<int>(cardinalities.size()) != num_vars)
      throw ValidationError(Err::DimensionMismatch, "cardinalities length != num_vars");
    for (int c : cardinalities)
      if (c < 2) throw ValidationError(Err::OutOfRange, "every cardinality must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw ValidationError(Err::OutOfRange, "epsilon must lie in (0,1)");
  }

  long num_states() const {
    long n = 1;
    for (int c : cardinalities) n *= c;
    return n;
  }
};

// Hierarchy induced by the DBN variable ordering: level l collapses the l
// fastest variables, so level L-j groups states by the values of the j
// slowest variables. Non-coarsening steps are pruned.
inline AbstractionHierarchy hierarchy_from_dbn(const DbnSpec& spec) {
  spec.validate();
  std::vector<std::int32_t> sizes;
  long n = spec.num_states();
  sizes.push_back(static_cast<std::int32_t>(n));
  std::vector<std::vector<std::int32_t>> maps;
  for (int v = 0; v < spec.num_vars; ++v) {
    const int card = spec.cardinalities[v];
    const long coarse = n / card;
    if (coarse == n) continue;  // unreachable for cardinalities >= 2
    std::vector<std::int32_t> pm(n);
    for (long s = 0; s < n; ++s) pm[s] = static_cast<std::int32_t>(s / card);
    maps.push_back(std::move(pm));
    sizes.push_back(static_cast<std::int32_t>(coarse));
    n = coarse;
  }
  return AbstractionHierarchy(std::move(sizes), std::move(maps));
}

inline std::string hierarchy_label(const AbstractionHierarchy& h) {
  std::string s;
  for (int l = 0; l < h.num_levels(); ++l) {
    if (l) s += '-';
    s += std::to_string(h.level_size(l));
  }
  return s;
}

}  // namespace tav
