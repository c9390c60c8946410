#include <gtest/gtest.h>

#include <cstdio>
#include <string>

#include "provseg/packet.hpp"
#include "provseg/rng.hpp"

using namespace provseg;

namespace {

std::string pct_str(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", pct);
  return buf;
}

BitVec random_bits(std::size_t n, double density, SplitMix64& rng) {
  BitVec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.next_bernoulli(density)) v.set(i);
  }
  return v;
}

}  // namespace

TEST(PayloadFraction, PublishedNumbers) {
  EXPECT_EQ(pct_str(payload_fraction(77, PayloadProfile::zigbee())), "3.9");
  EXPECT_EQ(pct_str(payload_fraction(77, PayloadProfile::lora())), "4.5");
  EXPECT_EQ(pct_str(payload_fraction(100, PayloadProfile::zigbee())), "5.1");
  EXPECT_EQ(pct_str(payload_fraction(100, PayloadProfile::lora())), "5.9");
}

TEST(PayloadFraction, BudgetOverflow) {
  EXPECT_THROW(payload_fraction(255 * 8 + 1, PayloadProfile::zigbee()), BudgetExceeded);
  EXPECT_NO_THROW(payload_fraction(255 * 8, PayloadProfile::zigbee()));
}

TEST(PayloadProfile, StandardSizes) {
  EXPECT_EQ(PayloadProfile::zigbee().payload_bytes, 255u);
  EXPECT_EQ(PayloadProfile::lora().payload_bytes, 222u);
  EXPECT_EQ(PayloadProfile::custom(64).payload_bytes, 64u);
  EXPECT_THROW(PayloadProfile::custom(0), std::invalid_argument);
}

TEST(PacketWire, KnownLayout) {
  ProvenancePacket packet;
  packet.prov = BitVec::from_string("10100");
  packet.app_payload = {0xDE, 0xAD};
  packet.params = {100, 8, 0};
  const auto bytes = serialize_packet(packet);
  const std::vector<std::uint8_t> expected{0x00, 0x05, 0xA0, 0xDE, 0xAD};
  EXPECT_EQ(bytes, expected);
}

TEST(PacketWire, RoundTripProperty) {
  SplitMix64 rng(3);
  const BloomParams params{100, 8, 0};
  for (int iter = 0; iter < 300; ++iter) {
    ProvenancePacket packet;
    packet.params = params;
    packet.prov = random_bits(1 + rng.next_below(400), 0.25, rng);
    packet.app_payload.resize(rng.next_below(32));
    for (auto& b : packet.app_payload) b = static_cast<std::uint8_t>(rng.next_u64());
    const auto bytes = serialize_packet(packet);
    const ProvenancePacket back = parse_packet(bytes, params);
    EXPECT_EQ(back.prov, packet.prov);
    EXPECT_EQ(back.app_payload, packet.app_payload);
    EXPECT_EQ(serialize_packet(back), bytes);
  }
}

TEST(PacketWire, MalformedInput) {
  const BloomParams params{100, 8, 0};
  EXPECT_THROW(parse_packet({0x00}, params), std::invalid_argument);         // truncated prefix
  EXPECT_THROW(parse_packet({0x00, 0x09, 0xFF}, params), std::invalid_argument);  // short field
  // nonzero pad bits after a 5-bit field
  EXPECT_THROW(parse_packet({0x00, 0x05, 0xA1}, params), std::invalid_argument);
}

TEST(BroadcastRecord, GoldenBytes) {
  BroadcastRecord rec;
  rec.dict = make_dictionary(0.0, 500.0, 2);
  rec.bloom = {100, 8, 1};
  rec.rake_r = 2;
  const auto bytes = serialize_broadcast(rec);
  EXPECT_EQ(to_hex(bytes),
            "0000000000000000"   // origin 0.0
            "407f400000000000"   // length 500.0
            "0002"               // S
            "0000" "0001"        // segment ids
            "0064"               // m
            "08"                 // k
            "0000000000000001"   // seed
            "02");               // r
  EXPECT_EQ(parse_broadcast(bytes), rec);
}

TEST(BroadcastRecord, RoundTripProperty) {
  SplitMix64 rng(41);
  for (int iter = 0; iter < 100; ++iter) {
    BroadcastRecord rec;
    rec.dict = make_dictionary(rng.next_unit() * 100.0, 1.0 + rng.next_unit() * 1000.0,
                               static_cast<std::uint16_t>(1 + rng.next_below(40)));
    rec.bloom = {static_cast<std::uint16_t>(8 + rng.next_below(400)),
                 static_cast<std::uint8_t>(1 + rng.next_below(8)), rng.next_u64()};
    rec.rake_r = static_cast<std::uint8_t>(1 + rng.next_below(4));
    EXPECT_EQ(parse_broadcast(serialize_broadcast(rec)), rec);
  }
  EXPECT_THROW(parse_broadcast({0x00, 0x01}), std::invalid_argument);
}

TEST(BroadcastRecord, LastBroadcastWins) {
  const auto first = serialize_broadcast({make_dictionary(0.0, 500.0, 5), {100, 8, 1}, 2});
  const auto second = serialize_broadcast({make_dictionary(0.0, 500.0, 10), {100, 8, 1}, 2});
  SegmentDictionary node_dict = parse_broadcast(first).dict;
  node_dict = parse_broadcast(second).dict;
  EXPECT_EQ(node_dict.num_segments(), 10u);
}

TEST(EmbedAndForward, SourceHopBounds) {
  const BloomParams params{100, 8, 0};
  const RakeParams rake{2};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  const auto packet = make_initial_packet({}, params, rake, PayloadProfile::zigbee());
  HopStats stats;
  const auto next = embed_and_forward(packet, {77, 130.0}, dict, rake, PayloadProfile::zigbee(),
                                      &stats);
  EXPECT_GE(stats.lit_after, 1u);
  EXPECT_LE(stats.lit_after, 8u);
  EXPECT_EQ(stats.field_bits, next.prov.size());
  const BitVec bits = decompress({next.prov, params.m}, rake);
  EXPECT_EQ(bits.popcount(), stats.lit_after);
}

TEST(EmbedAndForward, PreservesHistory) {
  const BloomParams params{100, 8, 9};
  const RakeParams rake{2};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  SplitMix64 rng(66);
  for (int iter = 0; iter < 50; ++iter) {
    ProvenancePacket packet = make_initial_packet({}, params, rake, PayloadProfile::zigbee());
    std::vector<ProvenanceKey> embedded;
    for (int hop = 0; hop < 5; ++hop) {
      const VehicleNode node{static_cast<std::uint32_t>(rng.next_u64()),
                             rng.next_unit() * 499.0};
      embedded.push_back({node.vehicle_id, dict.segment_of(node.position_m)});
      packet = embed_and_forward(packet, node, dict, rake, PayloadProfile::zigbee());
      const BloomFilter filter =
          BloomFilter::from_bits(params, decompress({packet.prov, params.m}, rake));
      for (const auto& key : embedded) {
        EXPECT_TRUE(filter.query(key));
      }
    }
  }
}

TEST(EmbedAndForward, ErrorPaths) {
  const BloomParams params{100, 8, 0};
  const RakeParams rake{2};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  const auto packet = make_initial_packet({}, params, rake, PayloadProfile::zigbee());
  EXPECT_THROW(
      embed_and_forward(packet, {1, 777.0}, dict, rake, PayloadProfile::zigbee()),
      OutOfCoverage);
  // 5-byte budget cannot hold the 2-byte prefix plus a ~45-bit field
  EXPECT_THROW(
      embed_and_forward(packet, {1, 10.0}, dict, rake, PayloadProfile::custom(5)),
      BudgetExceeded);
}

TEST(ForwardUncompressed, RawFieldIsFilterSized) {
  const BloomParams params{100, 8, 0};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  auto packet = make_initial_packet_uncompressed({}, params, PayloadProfile::zigbee());
  HopStats stats;
  packet = forward_uncompressed(packet, {5, 450.0}, dict, PayloadProfile::zigbee(), &stats);
  EXPECT_EQ(stats.field_bits, 100u);
  EXPECT_EQ(packet.prov.size(), 100u);
  const BloomFilter filter = BloomFilter::from_bits(params, packet.prov);
  EXPECT_TRUE(filter.query({5, dict.segment_of(450.0)}));
}

TEST(DecodeProvenance, AllZeroFilter) {
  const BloomParams params{100, 8, 0};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  const auto report = decode_provenance(BloomFilter(params), {1, 2, 3}, dict);
  EXPECT_EQ(report.not_on_path.size(), 3u);
  EXPECT_TRUE(report.ambiguous.empty());
  EXPECT_EQ(report.decoded_pair_count(), 0u);
}

TEST(DecodeProvenance, SingleEmbeddedPair) {
  const BloomParams params{100, 8, 0};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  BloomFilter filter(params);
  filter.insert({3, 2});
  std::vector<std::uint32_t> registered;
  for (std::uint32_t v = 0; v < 10; ++v) registered.push_back(v);
  const auto report = decode_provenance(filter, registered, dict);
  EXPECT_EQ(report.segments.at(3), (std::set<std::uint16_t>{2}));
  EXPECT_EQ(report.decoded_pair_count(), 1u);  // the 49 non-keys stay silent at this density
  EXPECT_EQ(report.not_on_path.size(), 9u);
}

TEST(DecodeProvenance, AmbiguityFlagged) {
  const BloomParams params{100, 8, 0};
  const auto dict = make_dictionary(0.0, 500.0, 5);
  BloomFilter filter(params);
  filter.insert({3, 2});
  filter.insert({3, 4});  // same vehicle claims two segments
  const auto report = decode_provenance(filter, {3}, dict);
  EXPECT_EQ(report.ambiguous, (std::vector<std::uint32_t>{3}));
  EXPECT_GE(report.segments.at(3).size(), 2u);
}
