// rng.hpp
// Seedable random draws with a fixed published algorithm (std::mt19937_64)
// and hand-rolled output mappings, so that every stream is reproducible
// bit-for-bit across platforms and across language ports of this toolkit.
#pragma once

#include <cstdint>
#include <random>

namespace penmf {

// SplitMix64 finalizer over state ^ value (Steele, Lea & Flood's
// SplittableRandom mixer). Used to derive replication seeds: chaining
// hash_mix over a tuple gives a documented, order-sensitive 64-bit hash.
inline std::uint64_t hash_mix(std::uint64_t state, std::uint64_t value) {
  std::uint64_t z = (state ^ value) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the half-open interval (0, 1]: top 53 bits plus one, scaled
  // by 2^-53. Never returns exactly zero.
  double uniform_pos() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n), n > 0. Lower-bound rejection keeps
  // the modulo step exact.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = gen_();
    while (x < threshold) x = gen_();
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace penmf
