#pragma once

#include <cstdint>
#include <random>

namespace cme {

// splitmix64 step; used to whiten seeds and derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream id for a (seed, tag, index) cell. Streams derived for
// distinct tags/indices are independent for practical purposes, so replicate
// cells can run in any order (or in parallel) and still reproduce bit-exactly.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t index = 0) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= tag * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  s ^= index + 0x632be59bd9b4e019ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b << 1) ^ c;
}

// mt19937_64 with uniforms built from raw 64-bit output instead of
// std::uniform_real_distribution; the draw sequence is then identical across
// standard libraries, which the byte-identical CSV contract relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // true with probability p
  bool bernoulli(double p) { return uniform01() < p; }

  int uniform_sign() { return (engine_() & 1ULL) ? 1 : -1; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cme
