#pragma once

// Counter-based random numbers.
//
// Every random draw in the toolkit is a pure function of (seed, stream,
// counter):
//
//   key          = mix(seed) ^ mix(stream ^ 0x6a09e667f3bcc909)
//   word(k)      = mix(key + (k + 1) * 0x9e3779b97f4a7c15)
//   uniform(k)   = (word(k) >> 11) * 2^-53            in [0, 1)
//
// where mix is the SplitMix64 finalizer. split(s) derives an independent
// child stream, so parallel consumers can each own a stream and results do
// not depend on scheduling.

#include "oslab/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace oslab {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64_mix(seed) ^ splitmix64_mix(stream ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t word(std::uint64_t counter) const {
    return splitmix64_mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  /// Child generator keyed by this generator's key and `stream`.
  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream); }

  // Sequential convenience interface over the same counter space.
  std::uint64_t next_word() { return word(counter_++); }
  double next_uniform() { return uniform(counter_++); }
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }
  /// Box-Muller; consumes two counters.
  double next_normal() {
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_word() % n; }

  Vector next_uniform_vector(int n, double lo = 0.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = next_uniform(lo, hi);
    return v;
  }
  Matrix next_normal_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = next_normal();
    return m;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace oslab
