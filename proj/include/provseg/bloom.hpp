#ifndef PROVSEG_BLOOM_HPP
#define PROVSEG_BLOOM_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "provseg/bitvec.hpp"
#include "provseg/rng.hpp"

namespace provseg {

// Seeded keyed hash: FNV-1a over the key bytes with the seed folded into the
// offset basis, avalanched by mix64. This is the reference hash family fixed
// by the wire docs; both ends must agree on it bit for bit.
inline std::uint64_t keyed_hash64(const std::uint8_t* data, std::size_t len, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x00000100000001b3ULL;
  }
  return mix64(h);
}

struct BloomParams {
  std::uint16_t m = 0;   // filter size in bits
  std::uint8_t k = 0;    // hash functions per key
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) throw std::invalid_argument("BloomParams: m must be >= 1");
    if (k < 1) throw std::invalid_argument("BloomParams: k must be >= 1");
    if (k > m) throw std::invalid_argument("BloomParams: k must not exceed m");
  }

  bool operator==(const BloomParams&) const = default;
};

struct ProvenanceKey {
  std::uint32_t vehicle_id = 0;
  std::uint16_t segment_id = 0;

  // Canonical wire encoding: 4-byte big-endian vehicle id, 2-byte big-endian
  // segment id.
  std::array<std::uint8_t, 6> canonical_bytes() const {
    return {
        static_cast<std::uint8_t>(vehicle_id >> 24),
        static_cast<std::uint8_t>(vehicle_id >> 16),
        static_cast<std::uint8_t>(vehicle_id >> 8),
        static_cast<std::uint8_t>(vehicle_id),
        static_cast<std::uint8_t>(segment_id >> 8),
        static_cast<std::uint8_t>(segment_id),
    };
  }

  bool operator==(const ProvenanceKey&) const = default;
};

// Each slot is an independent seeded draw: index_j = H(key, seed_j) mod m
// with seed_j derived from (seed, j). Draws within one key may coincide, so
// filter occupancy follows the (1 - (1 - 1/m)^(n k)) model that the analytic
// oracles and the false-positive estimate are built on. A double-hashing
// stride (h1 + j*h2 with h2 odd) does not have that property: its indices are
// almost always distinct, which lifts the mean lit fraction at the standard
// operating points far outside the model's sampling error.
inline std::vector<std::uint32_t> hash_indices(const BloomParams& params, const ProvenanceKey& key) {
  params.validate();
  const auto bytes = key.canonical_bytes();
  std::vector<std::uint32_t> indices(params.k);
  for (unsigned j = 0; j < params.k; ++j) {
    const std::uint64_t h =
        keyed_hash64(bytes.data(), bytes.size(), derive_stream_seed(params.seed, j));
    indices[j] = static_cast<std::uint32_t>(h % params.m);
  }
  return indices;
}

class BloomFilter {
 public:
  explicit BloomFilter(const BloomParams& params) : params_(params), bits_(params.m) {
    params.validate();
  }

  const BloomParams& params() const { return params_; }
  const BitVec& bits() const { return bits_; }

  void insert(const ProvenanceKey& key) {
    for (std::uint32_t i : hash_indices(params_, key)) {
      bits_.set(i, true);
    }
  }

  bool query(const ProvenanceKey& key) const {
    for (std::uint32_t i : hash_indices(params_, key)) {
      if (!bits_.get(i)) return false;
    }
    return true;
  }

  std::size_t lit_count() const { return bits_.popcount(); }

  // ceil(m/8) bytes, MSB-first, trailing pad bits zero.
  std::vector<std::uint8_t> serialize() const { return bits_.to_bytes(); }

  static BloomFilter deserialize(const BloomParams& params, const std::vector<std::uint8_t>& bytes) {
    BloomFilter f(params);
    f.bits_ = BitVec::from_bytes(bytes, params.m);
    return f;
  }

  // Rebuild from raw bits already in hand (e.g. after codec decompression).
  static BloomFilter from_bits(const BloomParams& params, BitVec bits) {
    if (bits.size() != params.m) {
      throw std::invalid_argument("BloomFilter::from_bits: bit length does not match m");
    }
    BloomFilter f(params);
    f.bits_ = std::move(bits);
    return f;
  }

  bool operator==(const BloomFilter&) const = default;

 private:
  BloomParams params_;
  BitVec bits_;
};

// Standard estimate (1 - (1 - 1/m)^(n*k))^k for the probability that a
// non-inserted key queries true after n insertions.
inline double false_positive_probability(const BloomParams& params, std::uint64_t n_inserted) {
  params.validate();
  if (n_inserted == 0) return 0.0;
  const double miss = std::pow(1.0 - 1.0 / static_cast<double>(params.m),
                               static_cast<double>(n_inserted) * params.k);
  return std::pow(1.0 - miss, static_cast<double>(params.k));
}

}  // namespace provseg

#endif  // PROVSEG_BLOOM_HPP
