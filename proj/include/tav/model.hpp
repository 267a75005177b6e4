#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "tav/common.hpp"

namespace tav {

// Discrete HMM in probability space. transition is row-stochastic N x N,
// emission row-stochastic N x M, initial a length-N distribution.
struct HmmModel {
  int num_states = 0;
  int num_symbols = 0;
  std::vector<double> transition;  // row-major N*N
  std::vector<double> emission;    // row-major N*M
  std::vector<double> initial;     // N

  double a(int i, int j) const { return transition[static_cast<std::size_t>(i) * num_states + j]; }
  double b(int i, int k) const { return emission[static_cast<std::size_t>(i) * num_symbols + k]; }
  double pi(int i) const { return initial[i]; }
};

// Same shape as HmmModel with every entry replaced by its natural log;
// zero probabilities become kNegInf.
struct LogModel {
  int num_states = 0;
  int num_symbols = 0;
  std::vector<double> log_transition;
  std::vector<double> log_emission;
  std::vector<double> log_initial;

  double a(int i, int j) const { return log_transition[static_cast<std::size_t>(i) * num_states + j]; }
  double b(int i, int k) const { return log_emission[static_cast<std::size_t>(i) * num_symbols + k]; }
  double pi(int i) const { return log_initial[i]; }
};

// Observed symbol sequence. Symbols are stored 0-based; time indices follow
// the 1-based convention Y_1..Y_T, see at(t).
struct ObservationSequence {
  std::vector<std::int32_t> symbols;

  int length() const { return static_cast<int>(symbols.size()); }
  std::int32_t at(int t) const { return symbols[static_cast<std::size_t>(t) - 1]; }
};

struct DecodeStats {
  long iterations = 0;
  long links_created = 0;
  long refinements_spatial = 0;
  long refinements_temporal = 0;
  long cells_explored = 0;
  double wall_time_ms = 0.0;
};

enum class DecodeStatus { ok, all_paths_impossible };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::ok;
  std::vector<std::int32_t> path;  // length T when status == ok
  double log_likelihood = kNegInf;
  DecodeStats stats;
};

namespace detail {

inline void check_row_stochastic(const std::vector<double>& m, int rows, int cols,
                                 const char* what) {
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      double v = m[static_cast<std::size_t>(i) * cols + j];
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError(Err::OutOfRange, std::string(what) + " entry (" +
                                                   std::to_string(i) + "," + std::to_string(j) +
                                                   ") outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError(Err::NotStochastic, std::string(what) + " row " + std::to_string(i) +
                                                    " sums to " + std::to_string(sum));
  }
}

}  // namespace detail

// Checks dimensions, [0,1] ranges and row-stochasticity (tolerance 1e-9),
// then converts to log space.
inline LogModel validate_model(const HmmModel& m) {
  const int n = m.num_states;
  const int k = m.num_symbols;
  if (n < 1 || k < 1)
    throw ValidationError(Err::DimensionMismatch, "num_states and num_symbols must be positive");
  if (m.transition.size() != static_cast<std::size_t>(n) * n)
    throw ValidationError(Err::DimensionMismatch, "transition matrix is not N x N");
  if (m.emission.size() != static_cast<std::size_t>(n) * k)
    throw ValidationError(Err::DimensionMismatch, "emission matrix is not N x M");
  if (m.initial.size() != static_cast<std::size_t>(n))
    throw ValidationError(Err::DimensionMismatch, "initial vector is not length N");

  detail::check_row_stochastic(m.transition, n, n, "transition");
  detail::check_row_stochastic(m.emission, n, k, "emission");
  detail::check_row_stochastic(m.initial, 1, n, "initial");

  LogModel out;
  out.num_states = n;
  out.num_symbols = k;
  out.log_transition.resize(m.transition.size());
  out.log_emission.resize(m.emission.size());
  out.log_initial.resize(m.initial.size());
  for (std::size_t i = 0; i < m.transition.size(); ++i)
    out.log_transition[i] = log_or_neginf(m.transition[i]);
  for (std::size_t i = 0; i < m.emission.size(); ++i)
    out.log_emission[i] = log_or_neginf(m.emission[i]);
  for (std::size_t i = 0; i < m.initial.size(); ++i)
    out.log_initial[i] = log_or_neginf(m.initial[i]);
  return out;
}

inline void check_observations(const LogModel& m, const ObservationSequence& obs) {
  for (std::size_t i = 0; i < obs.symbols.size(); ++i) {
    std::int32_t y = obs.symbols[i];
    if (y < 0 || y >= m.num_symbols)
      throw ValidationError(Err::OutOfRange, "observation " + std::to_string(i) + " = " +
                                                 std::to_string(y) + " outside [0," +
                                                 std::to_string(m.num_symbols) + ")");
  }
}

// Canonical log-probability of a concrete state path. Every decoder reports
// its log_likelihood through this routine so results computed by different
// algorithms are compared on identical arithmetic.
inline double score_path(const LogModel& m, const std::vector<std::int32_t>& path,
                         const ObservationSequence& obs) {
  const int t_max = obs.length();
  if (static_cast<int>(path.size()) != t_max)
    throw ValidationError(Err::DimensionMismatch, "path length differs from observation length");
  if (t_max == 0) throw ValidationError(Err::EmptyObservations, "empty observation sequence");

  KahanSum sum;
  double first = m.pi(path[0]) ;
  double e0 = m.b(path[0], obs.at(1));
  if (first == kNegInf || e0 == kNegInf) return kNegInf;
  sum.add(first);
  sum.add(e0);
  for (int t = 2; t <= t_max; ++t) {
    double a = m.a(path[t - 2], path[t - 1]);
    double b = m.b(path[t - 1], obs.at(t));
    if (a == kNegInf || b == kNegInf) return kNegInf;
    sum.add(a);
    sum.add(b);
  }
  return sum.value();
}

}  // namespace tav
