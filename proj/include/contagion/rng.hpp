#pragma once

// Counter-based random streams. Every draw is a pure function of
// (key, counter), where key = mix(seed, stream id), so results do not depend
// on how work is scheduled across threads.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace contagion {

/// The splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a sequence of words.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// Child seed of one Monte Carlo trial.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t n, std::uint64_t trial) {
  return mix_seed({base, n, trial});
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix_seed({seed, stream})) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform01(); }

  /// Number of failures before the first success of Bernoulli(q), q in (0, 1].
  std::uint64_t geometric(double q) {
    if (q >= 1.0) return 0;
    const double u = uniform_open0();
    const double k = std::floor(std::log(u) / std::log1p(-q));
    if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(k);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace contagion
