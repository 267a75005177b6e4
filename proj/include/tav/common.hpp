#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tav {

// Sentinel for log(0). All scoring is done in natural-log space.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Err {
  Io,
  DimensionMismatch,
  NotStochastic,
  OutOfRange,
  EmptyObservations,
  TooLarge,
  OrphanParent,
  SizeMismatch,
  NotCoarsening,
  DegenerateCluster,
  SpanTooShort,
  AlreadyConcrete,
  BadSegmentCount,
  Disconnected,
  IterationCapExceeded,
  LinkStructure,
  ConfigError,
  Mismatch,
  AgreementFailure,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::Io: return "Io";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::NotStochastic: return "NotStochastic";
    case Err::OutOfRange: return "OutOfRange";
    case Err::EmptyObservations: return "EmptyObservations";
    case Err::TooLarge: return "TooLarge";
    case Err::OrphanParent: return "OrphanParent";
    case Err::SizeMismatch: return "SizeMismatch";
    case Err::NotCoarsening: return "NotCoarsening";
    case Err::DegenerateCluster: return "DegenerateCluster";
    case Err::SpanTooShort: return "SpanTooShort";
    case Err::AlreadyConcrete: return "AlreadyConcrete";
    case Err::BadSegmentCount: return "BadSegmentCount";
    case Err::Disconnected: return "Disconnected";
    case Err::IterationCapExceeded: return "IterationCapExceeded";
    case Err::LinkStructure: return "LinkStructure";
    case Err::ConfigError: return "ConfigError";
    case Err::Mismatch: return "Mismatch";
    case Err::AgreementFailure: return "AgreementFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

// Malformed input or misuse of a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A broken invariant; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

inline double log_or_neginf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// count * v with the convention 0 * (-inf) == 0.
inline double scaled_log(long count, double v) {
  if (count == 0) return 0.0;
  return static_cast<double>(count) * v;
}

// Compensated accumulator; used wherever a log-likelihood is assembled from
// many per-step terms so independently computed totals agree bit-for-bit
// more often than naive summation would allow.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace tav
