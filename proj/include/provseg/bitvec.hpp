#ifndef PROVSEG_BITVEC_HPP
#define PROVSEG_BITVEC_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace provseg {

// Bit string with the wire bit order: bit 0 is the most significant bit of
// byte 0, trailing pad bits in the last byte stay zero. to_bytes() is
// therefore the serialized form.
class BitVec {
 public:
  BitVec() = default;

  explicit BitVec(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}

  static BitVec from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8) {
      throw std::invalid_argument("BitVec::from_bytes: byte count does not match bit length");
    }
    BitVec v;
    v.bytes_ = bytes;
    v.nbits_ = nbits;
    v.mask_tail();
    return v;
  }

  // Convenience for tests and small literals: "0100" etc.
  static BitVec from_string(std::string_view s) {
    BitVec v;
    for (char c : s) {
      if (c == '0') {
        v.push_back(false);
      } else if (c == '1') {
        v.push_back(true);
      } else {
        throw std::invalid_argument("BitVec::from_string: expected only '0'/'1'");
      }
    }
    return v;
  }

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool get(std::size_t i) const {
    check_index(i);
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  void set(std::size_t i, bool value = true) {
    check_index(i);
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
    if (value) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }

  void push_back(bool bit) {
    if (nbits_ % 8 == 0) {
      bytes_.push_back(0);
    }
    if (bit) {
      bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (nbits_ & 7));
    }
    ++nbits_;
  }

  // Appends the `count` low bits of `value`, most significant first.
  void append_bits(std::uint64_t value, unsigned count) {
    if (count > 64) {
      throw std::invalid_argument("BitVec::append_bits: count > 64");
    }
    for (unsigned i = count; i-- > 0;) {
      push_back((value >> i) & 1u);
    }
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (std::uint8_t b : bytes_) {
      n += static_cast<std::size_t>(std::popcount(b));
    }
    return n;
  }

  const std::vector<std::uint8_t>& to_bytes() const { return bytes_; }

  bool operator==(const BitVec& other) const = default;

 private:
  void check_index(std::size_t i) const {
    if (i >= nbits_) {
      throw std::out_of_range("BitVec: bit index " + std::to_string(i) + " out of range");
    }
  }

  void mask_tail() {
    const unsigned tail = nbits_ % 8;
    if (tail != 0 && !bytes_.empty()) {
      bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - tail));
    }
  }

  std::vector<std::uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

// Sequential cursor over a BitVec, used by token parsers.
class BitReader {
 public:
  explicit BitReader(const BitVec& v) : v_(&v) {}

  std::size_t remaining() const { return v_->size() - pos_; }
  std::size_t consumed() const { return pos_; }

  bool read1() { return v_->get(pos_++); }

  // Reads `count` bits MSB-first; caller checks remaining() beforehand.
  std::uint64_t read(unsigned count) {
    std::uint64_t value = 0;
    for (unsigned i = 0; i < count; ++i) {
      value = (value << 1) | static_cast<std::uint64_t>(read1());
    }
    return value;
  }

 private:
  const BitVec* v_;
  std::size_t pos_ = 0;
};

inline std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

inline std::vector<std::uint8_t> parse_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) {
    throw std::invalid_argument("parse_hex: odd number of hex digits");
  }
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw std::invalid_argument("parse_hex: invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace provseg

#endif  // PROVSEG_BITVEC_HPP
