#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace coopsim {

// Deterministic random source. Gaussian draws use an explicit Box-Muller
// transform on top of mt19937_64 so sequences depend only on the seed, not
// on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u));
    double a = 2.0 * 3.14159265358979323846 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex gaussian CN(0, variance).
  std::complex<double> complex_normal(double variance) {
    double u = uniform();
    double v = uniform();
    double r = std::sqrt(-variance * std::log1p(-u));
    double a = 2.0 * 3.14159265358979323846 * v;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Independent child stream; stable for a given (seed, tag).
  Rng derive(std::uint64_t tag) const {
    std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ull * (tag + 1));
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x = x ^ (x >> 31);
    return Rng(x);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace coopsim
