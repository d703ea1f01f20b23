#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <algorithm>
#include <random>

namespace trustsim {

// SplitMix64 finalizer. Used to derive independent per-game seed streams.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// seed_i = hash(master_seed, stream, index). Distinct `stream` tags keep
// collection, evaluation and session seeds disjoint.
constexpr std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t index) {
  return Mix64(Mix64(Mix64(master) ^ stream) + index);
}

// Stream tags.
inline constexpr std::uint64_t kCollectStream = 0xC011EC7ULL;
inline constexpr std::uint64_t kEvalStream = 0xE7A1ULL;
inline constexpr std::uint64_t kSessionStream = 0x5E5510ULL;
inline constexpr std::uint64_t kTrainStream = 0x7EA1ULL;

// Seedable generator whose draws depend only on the engine bit stream, so
// results do not vary with the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1).
  double UniformOpen() {
    double u;
    do {
      u = Uniform();
    } while (u == 0.0);
    return u;
  }

  // Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal, Marsaglia polar method.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * Uniform() - 1.0;
      v = 2.0 * Uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Gamma(shape, 1), Marsaglia-Tsang. Shapes below one use the
  // Gamma(shape + 1) * U^(1/shape) boost.
  double Gamma(double shape) {
    if (shape < 1.0) {
      const double u = UniformOpen();
      return Gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = Normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = UniformOpen();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double Beta(double a, double b) {
    const double x = Gamma(a);
    const double y = Gamma(b);
    return x / (x + y);
  }

  bool operator==(const Rng&) const = default;

  // Fisher-Yates.
  template <typename It>
  void Shuffle(It first, It last) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      const auto j = UniformInt(0, i);
      std::iter_swap(first + i, first + j);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trustsim
