#pragma once

#include <chrono>
#include <cstdint>
#include <utility>
#include <vector>

#include "tav/exploration.hpp"
#include "tav/model.hpp"
#include "tav/rng.hpp"

namespace tav {

// Classical Viterbi decoding in log space. Argmax ties break towards the
// smaller predecessor index. cells_explored = N * T.
inline DecodeResult viterbi_decode(const LogModel& m, const ObservationSequence& obs,
                                   ExplorationRecord* record = nullptr) {
  const int n = m.num_states;
  const int t_max = obs.length();
  if (t_max == 0) throw ValidationError(Err::EmptyObservations, "empty observation sequence");
  check_observations(m, obs);

  const auto start = std::chrono::steady_clock::now();

  // Transposed transition for cache locality in the inner max.
  std::vector<double> at(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) at[static_cast<std::size_t>(j) * n + i] = m.a(i, j);

  std::vector<double> prev(n), cur(n);
  std::vector<std::int32_t> back(static_cast<std::size_t>(n) * t_max, 0);
  for (int i = 0; i < n; ++i) prev[i] = m.pi(i) + m.b(i, obs.at(1));

  for (int t = 2; t <= t_max; ++t) {
    const std::int32_t y = obs.at(t);
    std::int32_t* bp = back.data() + static_cast<std::size_t>(t - 1) * n;
    for (int j = 0; j < n; ++j) {
      const double* col = at.data() + static_cast<std::size_t>(j) * n;
      double best = prev[0] + col[0];
      std::int32_t arg = 0;
      for (int i = 1; i < n; ++i) {
        double cand = prev[i] + col[i];
        if (cand > best) {
          best = cand;
          arg = i;
        }
      }
      cur[j] = best + m.b(j, y);
      bp[j] = arg;
    }
    std::swap(prev, cur);
  }

  DecodeResult res;
  res.stats.iterations = 1;
  res.stats.cells_explored = static_cast<long>(n) * t_max;
  if (record) {
    record->reset(n, t_max);
    for (int t = 1; t <= t_max; ++t)
      for (int s = 0; s < n; ++s) record->touch(t, s, 0);
  }

  double best = prev[0];
  std::int32_t arg = 0;
  for (int i = 1; i < n; ++i)
    if (prev[i] > best) {
      best = prev[i];
      arg = i;
    }
  if (best == kNegInf) {
    res.status = DecodeStatus::all_paths_impossible;
    res.stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

  res.path.resize(t_max);
  res.path[t_max - 1] = arg;
  for (int t = t_max - 1; t >= 1; --t)
    res.path[t - 1] = back[static_cast<std::size_t>(t) * n + res.path[t]];
  res.log_likelihood = score_path(m, res.path, obs);
  res.stats.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// Exhaustive argmax over all N^T state sequences; the oracle the fast
// decoders are tested against. Ties break to the lexicographically smallest
// path. Guarded to N^T <= 10^7.
inline DecodeResult brute_force_decode(const LogModel& m, const ObservationSequence& obs) {
  const int n = m.num_states;
  const int t_max = obs.length();
  if (t_max == 0) throw ValidationError(Err::EmptyObservations, "empty observation sequence");
  check_observations(m, obs);

  double combos = 1.0;
  for (int t = 0; t < t_max; ++t) {
    combos *= n;
    if (combos > 1e7) throw ValidationError(Err::TooLarge, "N^T exceeds 10^7");
  }

  std::vector<std::int32_t> seq(t_max, 0), best_seq;
  double best = kNegInf;
  // Odometer enumeration in lexicographic order; strict improvement keeps
  // the first (smallest) argmax.
  while (true) {
    double score = m.pi(seq[0]) + m.b(seq[0], obs.at(1));
    for (int t = 2; t <= t_max && score != kNegInf; ++t)
      score += m.a(seq[t - 2], seq[t - 1]) + m.b(seq[t - 1], obs.at(t));
    if (score > best) {
      best = score;
      best_seq = seq;
    }
    int pos = t_max - 1;
    while (pos >= 0 && ++seq[pos] == n) seq[pos--] = 0;
    if (pos < 0) break;
  }

  DecodeResult res;
  res.stats.iterations = 1;
  res.stats.cells_explored = static_cast<long>(n) * t_max;
  if (best == kNegInf) {
    res.status = DecodeStatus::all_paths_impossible;
    return res;
  }
  res.path = std::move(best_seq);
  res.log_likelihood = score_path(m, res.path, obs);
  return res;
}

// Samples a hidden trajectory and its observations; deterministic in seed.
inline std::pair<std::vector<std::int32_t>, ObservationSequence> sample_sequence(
    const HmmModel& m, int t_max, std::uint64_t seed) {
  if (t_max < 1) throw ValidationError(Err::OutOfRange, "T must be >= 1");
  Rng rng(seed);
  std::vector<std::int32_t> states(t_max);
  ObservationSequence obs;
  obs.symbols.resize(t_max);
  states[0] = rng.categorical(m.initial);
  obs.symbols[0] = rng.categorical(m.emission.data() + static_cast<std::size_t>(states[0]) * m.num_symbols,
                                   m.num_symbols);
  for (int t = 1; t < t_max; ++t) {
    states[t] = rng.categorical(m.transition.data() + static_cast<std::size_t>(states[t - 1]) * m.num_states,
                                m.num_states);
    obs.symbols[t] = rng.categorical(m.emission.data() + static_cast<std::size_t>(states[t]) * m.num_symbols,
                                     m.num_symbols);
  }
  return {std::move(states), std::move(obs)};
}

}  // namespace tav
