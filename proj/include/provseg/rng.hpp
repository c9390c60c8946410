#ifndef PROVSEG_RNG_HPP
#define PROVSEG_RNG_HPP

#include <cstdint>

namespace provseg {

// 64-bit avalanche mixer (MurmurHash3 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Small deterministic generator. The standard distributions are
// implementation-defined, so all draws below are spelled out explicitly and
// reproduce bit-identically across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). Modulo bias is below 1/2^32 for the bounds used
  // here.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(next_u64() % bound);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

 private:
  std::uint64_t state_;
};

// Per-trial stream seed: decorrelates consecutive trial indices so streams do
// not overlap as shifted copies of each other.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace provseg

#endif  // PROVSEG_RNG_HPP
