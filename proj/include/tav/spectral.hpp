#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tav/hierarchy.hpp"
#include "tav/model.hpp"
#include "tav/rng.hpp"

namespace tav {

namespace detail {

// Top eigenpair of a dense symmetric matrix by power iteration, to residual
// ||Mv - lambda v||_inf <= 1e-8. The matrix is expected to be shifted so the
// algebraically largest eigenvalue also has the largest modulus.
inline std::pair<double, std::vector<double>> power_iteration(const std::vector<double>& m, int n,
                                                              Rng& rng) {
  std::vector<double> v(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform() + 0.1;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;

  double lambda = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* row = m.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) acc += row[j] * v[j];
      w[i] = acc;
    }
    lambda = 0.0;
    for (int i = 0; i < n; ++i) lambda += v[i] * w[i];
    double resid = 0.0;
    for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(w[i] - lambda * v[i]));
    double wnorm = 0.0;
    for (double x : w) wnorm += x * x;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0.0) break;  // v is in the kernel; lambda = 0
    for (int i = 0; i < n; ++i) v[i] = w[i] / wnorm;
    if (resid <= 1e-8) break;
  }
  return {lambda, v};
}

// 2-means on 2-d rows with a fixed number of seeded restarts. Returns the
// assignment of the best restart, or an empty vector when every restart
// collapsed to one cluster.
inline std::vector<int> two_means(const std::vector<std::array<double, 2>>& x, int restarts,
                                  Rng& rng) {
  const int n = static_cast<int>(x.size());
  std::vector<int> best_assign;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    int c0 = static_cast<int>(rng.bits() % n);
    int c1 = static_cast<int>(rng.bits() % n);
    if (c1 == c0) c1 = (c0 + 1) % n;
    std::array<double, 2> mu0 = x[c0], mu1 = x[c1];
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        double d0 = (x[i][0] - mu0[0]) * (x[i][0] - mu0[0]) +
                    (x[i][1] - mu0[1]) * (x[i][1] - mu0[1]);
        double d1 = (x[i][0] - mu1[0]) * (x[i][0] - mu1[0]) +
                    (x[i][1] - mu1[1]) * (x[i][1] - mu1[1]);
        int a = d1 < d0 ? 1 : 0;
        if (a != assign[i]) {
          assign[i] = a;
          changed = true;
        }
      }
      double s0x = 0, s0y = 0, s1x = 0, s1y = 0;
      int n0 = 0, n1 = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == 0) {
          s0x += x[i][0];
          s0y += x[i][1];
          ++n0;
        } else {
          s1x += x[i][0];
          s1y += x[i][1];
          ++n1;
        }
      }
      if (n0 == 0 || n1 == 0) break;
      mu0 = {s0x / n0, s0y / n0};
      mu1 = {s1x / n1, s1y / n1};
      if (!changed) break;
    }
    int n0 = static_cast<int>(std::count(assign.begin(), assign.end(), 0));
    if (n0 == 0 || n0 == n) continue;
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& mu = assign[i] == 0 ? mu0 : mu1;
      cost += (x[i][0] - mu[0]) * (x[i][0] - mu[0]) + (x[i][1] - mu[1]) * (x[i][1] - mu[1]);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_assign = assign;
    }
  }
  return best_assign;
}

}  // namespace detail

// Induces an abstraction hierarchy by recursive spectral bisection of the
// symmetrized transition affinity (Ng-Jordan-Weiss construction: top-2
// eigenvectors of D^-1/2 W D^-1/2, row-normalized, clustered by 2-means with
// 20 seeded restarts). Splitting stops at clusters of at most min_leaf
// states. A degenerate split falls back to a balanced split by index;
// *degenerate_splits reports how often that happened.
inline AbstractionHierarchy induce_hierarchy_spectral(const LogModel& model, int max_children = 2,
                                                      int min_leaf = 2, std::uint64_t seed = 0,
                                                      int* degenerate_splits = nullptr) {
  const int n = model.num_states;
  if (n < 2) throw ValidationError(Err::OutOfRange, "spectral induction needs N >= 2");
  if (max_children < 2 || min_leaf < 1 || min_leaf > max_children)
    throw ValidationError(Err::OutOfRange,
                          "need max_children >= 2 and 1 <= min_leaf <= max_children");

  std::vector<double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = model.a(i, j);
      a[static_cast<std::size_t>(i) * n + j] = v == kNegInf ? 0.0 : std::exp(v);
    }

  int degenerate = 0;
  Rng rng(seed);

  struct TreeNode {
    std::vector<std::int32_t> members;
    int parent = -1;
    int depth = 0;
    bool leaf = false;
  };
  std::vector<TreeNode> tree;
  tree.push_back({std::vector<std::int32_t>(), -1, 0, false});
  for (std::int32_t s = 0; s < n; ++s) tree[0].members.push_back(s);

  for (std::size_t idx = 0; idx < tree.size(); ++idx) {
    const std::vector<std::int32_t> group = tree[idx].members;
    const int g = static_cast<int>(group.size());
    if (g <= min_leaf) {
      tree[idx].leaf = true;
      continue;
    }

    // Normalized affinity restricted to the group.
    std::vector<double> w(static_cast<std::size_t>(g) * g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        w[static_cast<std::size_t>(i) * g + j] =
            0.5 * (a[static_cast<std::size_t>(group[i]) * n + group[j]] +
                   a[static_cast<std::size_t>(group[j]) * n + group[i]]);
    std::vector<double> dinv(g);
    for (int i = 0; i < g; ++i) {
      double s = 0.0;
      for (int j = 0; j < g; ++j) s += w[static_cast<std::size_t>(i) * g + j];
      dinv[i] = s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
    }
    std::vector<double> m(static_cast<std::size_t>(g) * g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        m[static_cast<std::size_t>(i) * g + j] =
            dinv[i] * w[static_cast<std::size_t>(i) * g + j] * dinv[j] + (i == j ? 1.0 : 0.0);

    auto [l1, v1] = detail::power_iteration(m, g, rng);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        m[static_cast<std::size_t>(i) * g + j] -= l1 * v1[i] * v1[j];
    auto [l2, v2] = detail::power_iteration(m, g, rng);
    (void)l2;

    std::vector<std::array<double, 2>> rows(g);
    for (int i = 0; i < g; ++i) {
      double norm = std::sqrt(v1[i] * v1[i] + v2[i] * v2[i]);
      if (norm > 1e-300)
        rows[i] = {v1[i] / norm, v2[i] / norm};
      else
        rows[i] = {1.0, 0.0};
    }
    std::vector<int> assign = detail::two_means(rows, 20, rng);
    std::vector<std::int32_t> left, right;
    if (assign.empty()) {
      ++degenerate;
      for (int i = 0; i < g; ++i) (i < g / 2 ? left : right).push_back(group[i]);
    } else {
      for (int i = 0; i < g; ++i) (assign[i] == assign[0] ? left : right).push_back(group[i]);
    }

    TreeNode l{std::move(left), static_cast<int>(idx), tree[idx].depth + 1, false};
    TreeNode r{std::move(right), static_cast<int>(idx), tree[idx].depth + 1, false};
    tree.push_back(std::move(l));
    tree.push_back(std::move(r));
  }

  // Convert the tree into per-level parent maps: the cut at depth j contains
  // every node at depth j plus every shallower leaf; consecutive cuts give
  // one strictly coarsening level per tree depth.
  int max_depth = 0;
  for (const TreeNode& node : tree)
    if (node.leaf) max_depth = std::max(max_depth, node.depth);

  auto cut_at = [&](int j) {
    std::vector<int> members;  // tree indices
    for (int i = 0; i < static_cast<int>(tree.size()); ++i)
      if (tree[i].depth == j || (tree[i].leaf && tree[i].depth < j)) members.push_back(i);
    std::sort(members.begin(), members.end(),
              [&](int x, int y) { return tree[x].members[0] < tree[y].members[0]; });
    return members;
  };

  std::vector<std::int32_t> sizes{static_cast<std::int32_t>(n)};
  std::vector<std::vector<std::int32_t>> maps;

  std::vector<int> cur_cut = cut_at(max_depth);  // the leaf clusters
  if (static_cast<int>(cur_cut.size()) < n) {
    std::vector<std::int32_t> pm(n);
    for (int ci = 0; ci < static_cast<int>(cur_cut.size()); ++ci)
      for (std::int32_t s : tree[cur_cut[ci]].members) pm[s] = ci;
    maps.push_back(std::move(pm));
    sizes.push_back(static_cast<std::int32_t>(cur_cut.size()));
  } else {
    // every leaf is a singleton; the leaf level coincides with level 0
  }

  for (int j = max_depth; j >= 1; --j) {
    std::vector<int> next_cut = cut_at(j - 1);
    if (next_cut.size() == cur_cut.size()) {
      cur_cut = std::move(next_cut);
      continue;
    }
    std::vector<int> pos(tree.size(), -1);
    for (int i = 0; i < static_cast<int>(next_cut.size()); ++i) pos[next_cut[i]] = i;
    std::vector<std::int32_t> pm(cur_cut.size());
    for (int ci = 0; ci < static_cast<int>(cur_cut.size()); ++ci) {
      int node = cur_cut[ci];
      int up = tree[node].depth == j ? tree[node].parent : node;  // shallower leaves persist
      pm[ci] = pos[up];
    }
    maps.push_back(std::move(pm));
    sizes.push_back(static_cast<std::int32_t>(next_cut.size()));
    cur_cut = std::move(next_cut);
  }

  if (degenerate_splits) *degenerate_splits = degenerate;
  AbstractionHierarchy h(std::move(sizes), std::move(maps));
  validate_hierarchy(h, n);
  return h;
}

}  // namespace tav
