#include "conlearn/rng.hpp"

#include "conlearn/errors.hpp"

namespace conlearn {

__extension__ using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t v = splitmix64(s);
    words[2 * i] = static_cast<std::uint32_t>(v);
    words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  return std::mt19937_64(seq);
}

} // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine(seed)), seed_(seed) {}

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ a;
  h = splitmix64(s);
  s = h ^ (b * 0xd1342543de82ef95ULL);
  return Rng(splitmix64(s));
}

Rng Rng::split() {
  std::uint64_t s = next();
  return Rng(splitmix64(s));
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("Rng::below needs a positive bound");
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t t = (0 - bound) % bound;
    while (low < t) {
      x = next();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

} // namespace conlearn
