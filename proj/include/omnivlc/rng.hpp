#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace omnivlc {

/// One splitmix64 step. Good avalanche behavior, which is all we need to turn
/// a user seed plus a short tag path into well-separated substream seeds.
inline std::uint64_t mix_seed(std::uint64_t state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for a named substream of `seed`. Components are folded in one at a
/// time, so derive_seed(s, {a}) and derive_seed(s, {a, b}) are unrelated.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = mix_seed(seed);
  for (std::uint64_t element : path) state = mix_seed(state ^ element);
  return state;
}

/// Deterministic random stream. The engine is mt19937_64, whose output
/// sequence the standard pins down exactly; uniform and normal variates are
/// produced by fixed arithmetic here rather than by std distributions, whose
/// algorithms vary across standard libraries. Identical seeds therefore give
/// identical draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double low, double high) {
    return low + (high - low) * uniform();
  }

  /// Fair coin from the top bit of one engine word.
  bool bernoulli() { return (engine_() >> 63) != 0; }

  /// Standard normal via the Marsaglia polar method. Pairs are generated
  /// together; the spare is handed out on the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace omnivlc
