#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

#include "uqg/common.hpp"

namespace uqg {

/// splitmix64 finalizer, used to derive decorrelated child seeds
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic random stream. The distributions are implemented here rather
/// than taken from <random> so that a (seed, salt) pair pins the output bytes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// independent stream derived from (seed, salt); state of *this is untouched
  Rng child(std::uint64_t salt) const { return Rng(mix64(seed_) ^ mix64(salt + 0x51ab5fULL)); }

  std::uint64_t raw() { return gen_(); }

  /// uniform on [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// standard normal (Box-Muller)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  double exponential(double mean) {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return -mean * std::log(u);
  }

  /// unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t lim = ~0ull - ~0ull % n;
    std::uint64_t r = gen_();
    while (r >= lim) r = gen_();
    return r % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uqg
