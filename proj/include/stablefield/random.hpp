#ifndef STABLEFIELD_RANDOM_HPP
#define STABLEFIELD_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

namespace stablefield {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/**
 * A named, splittable random stream.
 *
 * Every stream is identified by a root seed and a path of stream names
 * ("realization/3", "paths/1", ...). Two streams with the same (seed, path)
 * produce identical variates regardless of which thread draws them, which is
 * what makes parallel realizations deterministic.
 *
 * Variate conversions are written out explicitly rather than delegated to
 * <random> distributions so that output is identical across standard
 * library implementations.
 */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::string_view name = "root")
      : seed_(seed), name_(name), engine_(mix(seed, name)) {}

  /// Child stream; independent of the parent's position.
  RandomStream derive(std::string_view child) const {
    std::string path = name_;
    path += '/';
    path += child;
    return RandomStream(seed_, path);
  }

  RandomStream derive(std::string_view child, std::uint64_t index) const {
    return derive(std::string(child) + "/" + std::to_string(index));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& name() const noexcept { return name_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's nearly-divisionless method would be faster; n is small here.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double exponential() { return -std::log(uniform()); }

  /// +1 or -1 with equal probability.
  int rademacher() { return (engine_() >> 63) ? 1 : -1; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::string_view name) {
    return detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a64(name)));
  }

  std::uint64_t seed_;
  std::string name_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stablefield

#endif  // STABLEFIELD_RANDOM_HPP
