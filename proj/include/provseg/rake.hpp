#ifndef PROVSEG_RAKE_HPP
#define PROVSEG_RAKE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "provseg/bitvec.hpp"
#include "provseg/rng.hpp"

namespace provseg {

// Payload ended in the middle of a token.
class TruncatedPayload : public std::runtime_error {
 public:
  TruncatedPayload() : std::runtime_error("rake: payload truncated mid-token") {}
};

// Payload encodes more bits than the declared original length.
class OverrunOutput : public std::runtime_error {
 public:
  OverrunOutput() : std::runtime_error("rake: decoded bits exceed original length") {}
};

struct RakeParams {
  unsigned r = 2;  // rake width R = 2^r

  unsigned width() const { return 1u << r; }

  void validate() const {
    if (r < 1 || r > 16) throw std::invalid_argument("RakeParams: r must be in [1, 16]");
  }

  void validate_for(std::size_t m) const {
    validate();
    if (width() > m) throw std::invalid_argument("RakeParams: rake width exceeds filter size");
  }

  bool operator==(const RakeParams&) const = default;
};

struct CompressedBits {
  BitVec payload;
  std::size_t original_len = 0;

  bool operator==(const CompressedBits&) const = default;
};

// Rake scan, left to right. A window of R bits starting at the cursor either
// is all zero (one 0 bit, cursor += R) or contains a set bit (a 1 bit plus
// the r-bit big-endian offset of the first set bit; cursor moves just past
// that bit). Bits past the end of the input read as zero, and original_len
// keeps that padding from ever being decoded as data.
inline CompressedBits compress(const BitVec& input, const RakeParams& params) {
  params.validate();
  const std::size_t n = input.size();
  const unsigned R = params.width();
  CompressedBits out;
  out.original_len = n;
  std::size_t pos = 0;
  while (pos < n) {
    unsigned first_set = R;
    const unsigned limit = static_cast<unsigned>(std::min<std::size_t>(R, n - pos));
    for (unsigned i = 0; i < limit; ++i) {
      if (input.get(pos + i)) {
        first_set = i;
        break;
      }
    }
    if (first_set == R) {
      out.payload.push_back(false);
      pos += R;
    } else {
      out.payload.push_back(true);
      out.payload.append_bits(first_set, params.r);
      pos += first_set + 1;
    }
  }
  return out;
}

namespace detail {

inline BitVec decode_tokens(BitReader& reader, std::size_t original_len,
                            const RakeParams& params) {
  const unsigned R = params.width();
  BitVec out(original_len);
  std::size_t pos = 0;
  while (pos < original_len) {
    if (reader.remaining() < 1) throw TruncatedPayload();
    if (!reader.read1()) {
      pos += R;  // all-zero window; may overshoot only on the final token
    } else {
      if (reader.remaining() < params.r) throw TruncatedPayload();
      const std::size_t offset = reader.read(params.r);
      pos += offset;
      if (pos >= original_len) throw OverrunOutput();  // set bit inside the padding
      out.set(pos, true);
      ++pos;
    }
  }
  return out;
}

}  // namespace detail

inline BitVec decompress(const CompressedBits& c, const RakeParams& params) {
  params.validate();
  BitReader reader(c.payload);
  BitVec out = detail::decode_tokens(reader, c.original_len, params);
  // Any leftover token would decode past original_len.
  if (reader.remaining() != 0) throw OverrunOutput();
  return out;
}

// Decode from a byte-padded payload whose exact bit length is unknown (e.g.
// hex input): up to 7 trailing zero pad bits are tolerated, anything else is
// excess data.
inline BitVec decompress_padded(const std::vector<std::uint8_t>& payload_bytes,
                                std::size_t original_len, const RakeParams& params) {
  params.validate();
  const BitVec payload = BitVec::from_bytes(payload_bytes, payload_bytes.size() * 8);
  BitReader reader(payload);
  BitVec out = detail::decode_tokens(reader, original_len, params);
  if (reader.remaining() >= 8) throw OverrunOutput();
  while (reader.remaining() > 0) {
    if (reader.read1()) throw OverrunOutput();
  }
  return out;
}

// Picks the candidate exponent that minimizes the mean compressed size of
// m-bit strings sampled from the given per-hop density profile. Ties go to
// the smaller exponent. The draw is fixed-seed so the result is a pure
// function of the arguments.
inline unsigned sweep_rake_param(const std::vector<double>& density_profile, std::size_t m,
                                 std::vector<unsigned> candidates,
                                 std::size_t samples_per_density = 2000) {
  if (candidates.empty()) throw std::invalid_argument("sweep_rake_param: no candidates");
  if (density_profile.empty()) throw std::invalid_argument("sweep_rake_param: empty profile");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<BitVec> pool;
  pool.reserve(density_profile.size() * samples_per_density);
  SplitMix64 rng(0x70726f7673656701ULL);
  for (double density : density_profile) {
    for (std::size_t s = 0; s < samples_per_density; ++s) {
      BitVec v(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (rng.next_bernoulli(density)) v.set(i, true);
      }
      pool.push_back(std::move(v));
    }
  }

  unsigned best_r = candidates.front();
  std::uint64_t best_total = UINT64_MAX;
  for (unsigned r : candidates) {
    const RakeParams params{r};
    params.validate_for(m);
    std::uint64_t total = 0;
    for (const BitVec& v : pool) {
      total += compress(v, params).payload.size();
    }
    if (total < best_total) {
      best_total = total;
      best_r = r;
    }
  }
  return best_r;
}

}  // namespace provseg

#endif  // PROVSEG_RAKE_HPP
