#pragma once

// Shared instance builders for the test suites.

#include <cstdint>
#include <vector>

#include "tav/tavhmm.hpp"

namespace tav::test {

// Row-stochastic model with strictly positive entries.
inline HmmModel random_model(std::uint64_t seed, int n, int m) {
  Rng rng(seed);
  HmmModel model;
  model.num_states = n;
  model.num_symbols = m;
  auto fill_rows = [&](std::vector<double>& out, int rows, int cols) {
    out.resize(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
      double total = 0.0;
      for (int j = 0; j < cols; ++j) {
        double w = 0.05 + rng.uniform();
        out[static_cast<std::size_t>(i) * cols + j] = w;
        total += w;
      }
      for (int j = 0; j < cols; ++j) out[static_cast<std::size_t>(i) * cols + j] /= total;
    }
  };
  fill_rows(model.transition, n, n);
  fill_rows(model.emission, n, m);
  fill_rows(model.initial, 1, n);
  return model;
}

inline ObservationSequence random_obs(std::uint64_t seed, int t, int m) {
  Rng rng(seed);
  ObservationSequence obs;
  obs.symbols.resize(t);
  for (int i = 0; i < t; ++i) obs.symbols[i] = static_cast<std::int32_t>(rng.bits() % m);
  return obs;
}

// Binary bit-grouping hierarchy over n = 2^k states.
inline AbstractionHierarchy binary_hierarchy(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  DbnSpec spec;
  spec.num_vars = k;
  spec.cardinalities.assign(k, 2);
  spec.epsilon = 0.5;
  return hierarchy_from_dbn(spec);
}

}  // namespace tav::test
