#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tav {

// Deterministic sampling built directly on mt19937_64 raw draws. The standard
// distributions are implementation-defined, so they are avoided here; the
// generators promise bit-identical output for identical seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t bits() { return gen_(); }

  // Index sampled from unnormalized non-negative weights.
  int categorical(const double* w, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += w[i];
    double r = uniform() * total;
    double acc = 0.0;
    int last_positive = -1;
    for (int i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      last_positive = i;
      acc += w[i];
      if (r < acc) return i;
    }
    return last_positive;  // guards against accumulated rounding at r ~ total
  }

  int categorical(const std::vector<double>& w) {
    return categorical(w.data(), static_cast<int>(w.size()));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tav
