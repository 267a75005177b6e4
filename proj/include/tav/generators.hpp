#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tav/hierarchy.hpp"
#include "tav/model.hpp"
#include "tav/rng.hpp"
#include "tav/viterbi.hpp"

namespace tav {

// Joint HMM over n coupled variables with timescale separation: variable i
// (1 = fastest) changes value each step with probability epsilon^i and
// otherwise keeps it; on a change the new value is drawn from a seeded
// distribution over the other values that depends on the full previous
// state. The emission matrix is square with 0.6 on the diagonal and the
// remaining mass spread uniformly; the initial distribution is uniform.
inline std::pair<HmmModel, AbstractionHierarchy> generate_dbn_model(const DbnSpec& spec) {
  spec.validate();
  const long n_long = spec.num_states();
  if (n_long > (1 << 20))
    throw ValidationError(Err::TooLarge, "DBN state space exceeds 2^20 states");
  const int n = static_cast<int>(n_long);
  const int vars = spec.num_vars;

  // Mixed-radix digit weights; fastest variable is the least significant.
  std::vector<long> weight(vars);
  weight[0] = 1;
  for (int v = 1; v < vars; ++v) weight[v] = weight[v - 1] * spec.cardinalities[v - 1];
  auto digit = [&](long s, int v) {
    return static_cast<int>((s / weight[v]) % spec.cardinalities[v]);
  };

  // Per-variable change probability epsilon^i, i = 1 for the fastest.
  std::vector<double> change(vars);
  double p = 1.0;
  for (int v = 0; v < vars; ++v) {
    p *= spec.epsilon;
    change[v] = p;
  }

  // Change-target distributions q_v(new | full previous state), zero on the
  // retained value.
  Rng rng(spec.seed);
  std::vector<std::vector<double>> q(vars);
  for (int v = 0; v < vars; ++v) {
    const int card = spec.cardinalities[v];
    q[v].assign(static_cast<std::size_t>(n) * card, 0.0);
    for (int s = 0; s < n; ++s) {
      const int cur = digit(s, v);
      double total = 0.0;
      for (int val = 0; val < card; ++val) {
        if (val == cur) continue;
        double wgt = 0.05 + rng.uniform();
        q[v][static_cast<std::size_t>(s) * card + val] = wgt;
        total += wgt;
      }
      for (int val = 0; val < card; ++val)
        q[v][static_cast<std::size_t>(s) * card + val] /= total;
    }
  }

  HmmModel model;
  model.num_states = n;
  model.num_symbols = n;
  model.transition.resize(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < n; ++s) {
    for (int s2 = 0; s2 < n; ++s2) {
      double prob = 1.0;
      for (int v = 0; v < vars && prob > 0.0; ++v) {
        const int cur = digit(s, v);
        const int nxt = digit(s2, v);
        if (nxt == cur)
          prob *= 1.0 - change[v];
        else
          prob *= change[v] * q[v][static_cast<std::size_t>(s) * spec.cardinalities[v] + nxt];
      }
      model.transition[static_cast<std::size_t>(s) * n + s2] = prob;
    }
  }
  model.emission.assign(static_cast<std::size_t>(n) * n, 0.4 / (n - 1));
  for (int s = 0; s < n; ++s) model.emission[static_cast<std::size_t>(s) * n + s] = 0.6;
  model.initial.assign(n, 1.0 / n);

  return {std::move(model), hierarchy_from_dbn(spec)};
}

struct DbnInstance {
  HmmModel model;
  AbstractionHierarchy hierarchy;
  ObservationSequence obs;
  std::vector<std::int32_t> states;
};

// Model plus a sampled observation sequence; the observation stream is
// seeded with spec.seed + 1 so model parameters and data stay decoupled.
inline DbnInstance generate_dbn_instance(const DbnSpec& spec, int horizon) {
  auto [model, hierarchy] = generate_dbn_model(spec);
  auto [states, obs] = sample_sequence(model, horizon, spec.seed + 1);
  return {std::move(model), std::move(hierarchy), std::move(obs), std::move(states)};
}

struct CityInstance {
  HmmModel model;
  AbstractionHierarchy hierarchy;
  ObservationSequence obs;
  std::vector<std::int32_t> states;
};

// Tracking toy: 27 cities in 9 countries on 3 continents over 50 days.
// Each day the subject almost always stays put, rarely changes city within
// the country, more rarely changes country within the continent and almost
// never changes continent (0.90 / 0.07 / 0.025 / 0.005 mass split across the
// eligible targets). Observations are a 27-symbol alphabet peaked per city.
inline CityInstance generate_city_instance(std::uint64_t seed) {
  constexpr int kCities = 27;
  constexpr int kDays = 50;
  HmmModel model;
  model.num_states = kCities;
  model.num_symbols = kCities;
  model.transition.resize(kCities * kCities);
  for (int i = 0; i < kCities; ++i) {
    for (int j = 0; j < kCities; ++j) {
      double v;
      if (j == i)
        v = 0.90;
      else if (j / 3 == i / 3)
        v = 0.07 / 2;  // two other cities in the country
      else if (j / 9 == i / 9)
        v = 0.025 / 6;  // six cities in other countries of the continent
      else
        v = 0.005 / 18;  // eighteen cities on other continents
      model.transition[static_cast<std::size_t>(i) * kCities + j] = v;
    }
  }
  model.emission.assign(static_cast<std::size_t>(kCities) * kCities, 0.4 / (kCities - 1));
  for (int i = 0; i < kCities; ++i)
    model.emission[static_cast<std::size_t>(i) * kCities + i] = 0.6;
  model.initial.assign(kCities, 1.0 / kCities);

  std::vector<std::int32_t> city_to_country(kCities), country_to_continent(9);
  for (int i = 0; i < kCities; ++i) city_to_country[i] = i / 3;
  for (int i = 0; i < 9; ++i) country_to_continent[i] = i / 3;
  AbstractionHierarchy hierarchy({27, 9, 3},
                                 {std::move(city_to_country), std::move(country_to_continent)});

  auto [states, obs] = sample_sequence(model, kDays, seed);
  return {std::move(model), std::move(hierarchy), std::move(obs), std::move(states)};
}

}  // namespace tav
