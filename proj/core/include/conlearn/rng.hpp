#pragma once

// Seedable, splittable generator used by the simulator and the sweeps.
// Every draw is built from raw 64-bit outputs so streams are identical
// across standard libraries.

#include <cstdint>
#include <random>

namespace conlearn {

/// One step of splitmix64; used to spread seeds and derive child streams.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  /// Stream for (seed, a, b); distinct tuples give unrelated streams.
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  /// Child stream; advances this generator by one draw.
  Rng split();

  std::uint64_t next() { return engine_(); }
  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p);

  std::uint64_t seed() const { return seed_; }

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

} // namespace conlearn
