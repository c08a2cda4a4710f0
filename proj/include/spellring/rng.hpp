#ifndef SPELLRING_RNG_HPP
#define SPELLRING_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace spellring {

// Deterministic random source. The engine (mt19937_64) produces the same
// stream on every platform; the distributions are implemented by hand because
// the standard-library ones are not bit-stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Multiply-shift bound; the tiny bias is
  // irrelevant for simulation and augmentation draws.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  bool chance(double p) { return uniform() < p; }

  // Box-Muller, one value per call (the pair's second half is cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // Independent substream keyed off the root seed only, so sessions, items,
  // and batches get the same generator no matter how much of the parent
  // stream has been consumed.
  Rng substream(std::uint64_t stream_id) const {
    return Rng(mix(seed_, stream_id));
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace spellring

#endif
