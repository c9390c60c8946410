#ifndef PROVSEG_PACKET_HPP
#define PROVSEG_PACKET_HPP

#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "provseg/bitvec.hpp"
#include "provseg/bloom.hpp"
#include "provseg/rake.hpp"
#include "provseg/segment.hpp"

namespace provseg {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t needed_bytes, std::size_t budget_bytes)
      : std::runtime_error("packet needs " + std::to_string(needed_bytes) +
                           " bytes but the payload budget is " + std::to_string(budget_bytes)) {}
};

struct PayloadProfile {
  std::string name;
  std::size_t payload_bytes = 0;

  static PayloadProfile zigbee() { return {"zigbee", 255}; }
  static PayloadProfile lora() { return {"lora", 222}; }  // data rate 7
  static PayloadProfile custom(std::size_t bytes) {
    if (bytes < 1) throw std::invalid_argument("PayloadProfile: payload_bytes must be >= 1");
    return {std::to_string(bytes), bytes};
  }

  bool operator==(const PayloadProfile&) const = default;
};

// Byte-granular share of the payload taken by a provenance field of the
// given bit length.
inline double payload_fraction(std::size_t prov_field_bits, const PayloadProfile& profile) {
  if (profile.payload_bytes == 0) throw std::invalid_argument("payload_fraction: empty profile");
  const std::size_t bytes = (prov_field_bits + 7) / 8;
  const double pct =
      100.0 * static_cast<double>(bytes) / static_cast<double>(profile.payload_bytes);
  if (pct > 100.0) throw BudgetExceeded(bytes, profile.payload_bytes);
  return pct;
}

// In-memory packet. The filter parameters are session configuration carried
// for convenience; they are distributed in the broadcast phase and never
// serialized per packet.
struct ProvenancePacket {
  std::vector<std::uint8_t> app_payload;
  BitVec prov;  // compressed filter bits (raw filter bits when running uncompressed)
  BloomParams params;
};

namespace wire {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Cursor {
 public:
  explicit Cursor(const std::vector<std::uint8_t>& bytes) : bytes_(&bytes) {}

  std::size_t remaining() const { return bytes_->size() - pos_; }

  std::uint8_t u8() {
    take(1);
    return (*bytes_)[pos_ - 1];
  }

  std::uint16_t u16() {
    take(2);
    return static_cast<std::uint16_t>(((*bytes_)[pos_ - 2] << 8) | (*bytes_)[pos_ - 1]);
  }

  std::uint64_t u64() {
    take(8);
    std::uint64_t v = 0;
    for (std::size_t i = pos_ - 8; i < pos_; ++i) v = (v << 8) | (*bytes_)[i];
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::vector<std::uint8_t> bytes(std::size_t n) {
    take(n);
    return {bytes_->begin() + static_cast<std::ptrdiff_t>(pos_ - n),
            bytes_->begin() + static_cast<std::ptrdiff_t>(pos_)};
  }

  std::vector<std::uint8_t> rest() { return bytes(remaining()); }

 private:
  void take(std::size_t n) {
    if (remaining() < n) throw std::invalid_argument("wire: record truncated");
    pos_ += n;
  }

  const std::vector<std::uint8_t>* bytes_;
  std::size_t pos_ = 0;
};

}  // namespace wire

// Provenance field layout, bit exact:
//   [prov_len_bits: u16 big-endian][ceil(len/8) bytes, MSB-first, zero pad]
// followed by the opaque application payload.
inline std::vector<std::uint8_t> serialize_packet(const ProvenancePacket& packet) {
  if (packet.prov.size() > 0xFFFF) {
    throw std::invalid_argument("serialize_packet: provenance field exceeds 16-bit length");
  }
  std::vector<std::uint8_t> out;
  const auto& prov_bytes = packet.prov.to_bytes();
  out.reserve(2 + prov_bytes.size() + packet.app_payload.size());
  wire::put_u16(out, static_cast<std::uint16_t>(packet.prov.size()));
  out.insert(out.end(), prov_bytes.begin(), prov_bytes.end());
  out.insert(out.end(), packet.app_payload.begin(), packet.app_payload.end());
  return out;
}

inline ProvenancePacket parse_packet(const std::vector<std::uint8_t>& bytes,
                                     const BloomParams& params) {
  wire::Cursor cur(bytes);
  const std::uint16_t len_bits = cur.u16();
  const auto prov_bytes = cur.bytes((static_cast<std::size_t>(len_bits) + 7) / 8);
  ProvenancePacket packet;
  packet.prov = BitVec::from_bytes(prov_bytes, len_bits);
  if (packet.prov.to_bytes() != prov_bytes) {
    throw std::invalid_argument("parse_packet: nonzero padding in provenance field");
  }
  packet.app_payload = cur.rest();
  packet.params = params;
  return packet;
}

// Session configuration pushed by the RSU in the broadcast phase. Fixed-order
// big-endian record:
//   road_origin f64, road_length f64, S u16, segment_ids S*u16,
//   m u16, k u8, seed u64, r u8
struct BroadcastRecord {
  SegmentDictionary dict;
  BloomParams bloom;
  std::uint8_t rake_r = 2;

  bool operator==(const BroadcastRecord&) const = default;
};

inline std::vector<std::uint8_t> serialize_broadcast(const BroadcastRecord& rec) {
  rec.dict.validate();
  rec.bloom.validate();
  std::vector<std::uint8_t> out;
  wire::put_f64(out, rec.dict.road_origin_m);
  wire::put_f64(out, rec.dict.road_length_m);
  wire::put_u16(out, static_cast<std::uint16_t>(rec.dict.num_segments()));
  for (std::uint16_t id : rec.dict.segment_ids) wire::put_u16(out, id);
  wire::put_u16(out, rec.bloom.m);
  out.push_back(rec.bloom.k);
  wire::put_u64(out, rec.bloom.seed);
  out.push_back(rec.rake_r);
  return out;
}

inline BroadcastRecord parse_broadcast(const std::vector<std::uint8_t>& bytes) {
  wire::Cursor cur(bytes);
  BroadcastRecord rec;
  rec.dict.road_origin_m = cur.f64();
  rec.dict.road_length_m = cur.f64();
  const std::uint16_t s = cur.u16();
  rec.dict.segment_ids.resize(s);
  for (std::uint16_t i = 0; i < s; ++i) rec.dict.segment_ids[i] = cur.u16();
  rec.bloom.m = cur.u16();
  rec.bloom.k = cur.u8();
  rec.bloom.seed = cur.u64();
  rec.rake_r = cur.u8();
  if (cur.remaining() != 0) throw std::invalid_argument("parse_broadcast: trailing bytes");
  rec.dict.validate();
  rec.bloom.validate();
  return rec;
}

// Per-hop observables, filled when a stats sink is passed to the forwarding
// calls. Work units are the deterministic operation counts the simulator uses
// as virtual processing time; wall seconds are the measured time spent inside
// the codec calls themselves.
struct HopStats {
  std::size_t lit_after = 0;
  std::size_t field_bits = 0;
  double codec_wall_seconds = 0.0;
  std::uint64_t codec_work_units = 0;
};

namespace detail {
inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}
}  // namespace detail

inline ProvenancePacket make_initial_packet(std::vector<std::uint8_t> app_payload,
                                            const BloomParams& params, const RakeParams& rake,
                                            const PayloadProfile& profile) {
  rake.validate_for(params.m);
  ProvenancePacket packet;
  packet.app_payload = std::move(app_payload);
  packet.params = params;
  packet.prov = compress(BloomFilter(params).bits(), rake).payload;
  const std::size_t needed = 2 + (packet.prov.size() + 7) / 8 + packet.app_payload.size();
  if (needed > profile.payload_bytes) throw BudgetExceeded(needed, profile.payload_bytes);
  return packet;
}

inline ProvenancePacket make_initial_packet_uncompressed(std::vector<std::uint8_t> app_payload,
                                                         const BloomParams& params,
                                                         const PayloadProfile& profile) {
  ProvenancePacket packet;
  packet.app_payload = std::move(app_payload);
  packet.params = params;
  packet.prov = BloomFilter(params).bits();
  const std::size_t needed = 2 + (packet.prov.size() + 7) / 8 + packet.app_payload.size();
  if (needed > profile.payload_bytes) throw BudgetExceeded(needed, profile.payload_bytes);
  return packet;
}

// One forwarding step: decompress the shared filter, embed this node's
// (vehicle, segment) identity, recompress, rewrite the length prefix. Every
// previously embedded key still queries true afterwards.
inline ProvenancePacket embed_and_forward(const ProvenancePacket& packet, const VehicleNode& node,
                                          const SegmentDictionary& dict, const RakeParams& rake,
                                          const PayloadProfile& profile,
                                          HopStats* stats = nullptr) {
  rake.validate_for(packet.params.m);
  const ProvenanceKey key{node.vehicle_id, dict.segment_of(node.position_m)};

  auto t0 = std::chrono::steady_clock::now();
  BitVec filter_bits = decompress({packet.prov, packet.params.m}, rake);
  const double decompress_seconds = detail::seconds_since(t0);

  BloomFilter filter = BloomFilter::from_bits(packet.params, std::move(filter_bits));
  filter.insert(key);

  t0 = std::chrono::steady_clock::now();
  CompressedBits recompressed = compress(filter.bits(), rake);
  const double compress_seconds = detail::seconds_since(t0);

  ProvenancePacket next;
  next.app_payload = packet.app_payload;
  next.params = packet.params;
  next.prov = std::move(recompressed.payload);

  const std::size_t needed = 2 + (next.prov.size() + 7) / 8 + next.app_payload.size();
  if (needed > profile.payload_bytes) throw BudgetExceeded(needed, profile.payload_bytes);

  if (stats != nullptr) {
    stats->lit_after = filter.lit_count();
    stats->field_bits = next.prov.size();
    stats->codec_wall_seconds = decompress_seconds + compress_seconds;
    // every payload bit read or written plus every filter bit scanned, twice
    stats->codec_work_units =
        (packet.prov.size() + packet.params.m) + (packet.params.m + next.prov.size());
  }
  return next;
}

// Baseline without the codec: the field carries the raw filter bits.
inline ProvenancePacket forward_uncompressed(const ProvenancePacket& packet,
                                             const VehicleNode& node,
                                             const SegmentDictionary& dict,
                                             const PayloadProfile& profile,
                                             HopStats* stats = nullptr) {
  const ProvenanceKey key{node.vehicle_id, dict.segment_of(node.position_m)};

  auto t0 = std::chrono::steady_clock::now();
  BloomFilter filter = BloomFilter::from_bits(packet.params, packet.prov);
  const double unpack_seconds = detail::seconds_since(t0);

  filter.insert(key);

  ProvenancePacket next;
  next.app_payload = packet.app_payload;
  next.params = packet.params;

  t0 = std::chrono::steady_clock::now();
  next.prov = filter.bits();
  const double pack_seconds = detail::seconds_since(t0);

  const std::size_t needed = 2 + (next.prov.size() + 7) / 8 + next.app_payload.size();
  if (needed > profile.payload_bytes) throw BudgetExceeded(needed, profile.payload_bytes);

  if (stats != nullptr) {
    stats->lit_after = filter.lit_count();
    stats->field_bits = next.prov.size();
    stats->codec_wall_seconds = unpack_seconds + pack_seconds;
    // two byte-level copies of the field
    stats->codec_work_units = 2 * ((packet.params.m + 7) / 8);
  }
  return next;
}

struct DecodeReport {
  // every registered vehicle -> set of segments whose key queries true
  std::map<std::uint32_t, std::set<std::uint16_t>> segments;
  std::vector<std::uint32_t> not_on_path;  // vehicles with an empty set
  std::vector<std::uint32_t> ambiguous;    // vehicles with more than one segment

  std::size_t decoded_pair_count() const {
    std::size_t n = 0;
    for (const auto& [vid, segs] : segments) n += segs.size();
    return n;
  }
};

// RSU-side recovery: the candidate grid is every registered vehicle crossed
// with every dictionary segment. Ambiguities are reported, never resolved.
inline DecodeReport decode_provenance(const BloomFilter& filter,
                                      const std::vector<std::uint32_t>& registered,
                                      const SegmentDictionary& dict) {
  dict.validate();
  DecodeReport report;
  for (std::uint32_t vid : registered) {
    auto& segs = report.segments[vid];
    for (std::uint16_t sid : dict.segment_ids) {
      if (filter.query({vid, sid})) segs.insert(sid);
    }
    if (segs.empty()) {
      report.not_on_path.push_back(vid);
    } else if (segs.size() > 1) {
      report.ambiguous.push_back(vid);
    }
  }
  return report;
}

}  // namespace provseg

#endif  // PROVSEG_PACKET_HPP
