#include <gtest/gtest.h>

#include "provseg/rng.hpp"
#include "provseg/segment.hpp"

using namespace provseg;

namespace {

// independent oracle: linear scan over explicit interval bounds
std::size_t brute_force_segment(const SegmentDictionary& dict, double pos) {
  const std::size_t s = dict.num_segments();
  const double width = dict.road_length_m / static_cast<double>(s);
  for (std::size_t i = 0; i < s; ++i) {
    const double lo = dict.road_origin_m + width * static_cast<double>(i);
    const double hi = (i + 1 == s) ? dict.road_origin_m + dict.road_length_m
                                   : dict.road_origin_m + width * static_cast<double>(i + 1);
    if (pos >= lo && pos < hi) return i;
  }
  throw OutOfCoverage(pos);
}

}  // namespace

TEST(SegmentDictionary, FiveSegmentRoad) {
  const SegmentDictionary dict = make_dictionary(0.0, 500.0, 5);
  EXPECT_EQ(dict.segment_of(0.0), 0);       // lower edge
  EXPECT_EQ(dict.segment_of(499.99), 4);    // upper edge
  EXPECT_EQ(dict.segment_of(100.0), 1);     // exact boundary goes up
  EXPECT_EQ(dict.segment_of(99.999), 0);
  EXPECT_EQ(dict.segment_of(250.0), 2);
}

TEST(SegmentDictionary, OutOfCoverage) {
  const SegmentDictionary dict = make_dictionary(0.0, 500.0, 5);
  EXPECT_THROW(dict.segment_of(-0.01), OutOfCoverage);
  EXPECT_THROW(dict.segment_of(500.0), OutOfCoverage);  // half-open at the top
  EXPECT_THROW(dict.segment_of(1e9), OutOfCoverage);
}

TEST(SegmentDictionary, BruteForceAgreement) {
  const SegmentDictionary dict = make_dictionary(120.0, 730.0, 7);
  SplitMix64 rng(17);
  for (int i = 0; i < 5000; ++i) {
    const double pos = 120.0 + rng.next_unit() * 730.0;
    EXPECT_EQ(dict.segment_index_of(pos), brute_force_segment(dict, pos));
  }
  // boundaries exactly
  for (int i = 0; i < 7; ++i) {
    const double pos = 120.0 + i * (730.0 / 7.0);
    EXPECT_EQ(dict.segment_index_of(pos), brute_force_segment(dict, pos));
  }
}

TEST(SegmentDictionary, SingleSegment) {
  const SegmentDictionary dict = make_dictionary(0.0, 500.0, 1);
  EXPECT_EQ(dict.segment_of(0.0), 0);
  EXPECT_EQ(dict.segment_of(499.0), 0);
}

TEST(SegmentDictionary, Validation) {
  SegmentDictionary dict;
  dict.road_length_m = 100.0;
  EXPECT_THROW(dict.validate(), std::invalid_argument);  // no segments
  dict.segment_ids = {1, 1};
  EXPECT_THROW(dict.validate(), std::invalid_argument);  // duplicate ids
  dict.segment_ids = {1, 2};
  dict.road_length_m = 0.0;
  EXPECT_THROW(dict.validate(), std::invalid_argument);  // empty interval
  dict.road_length_m = 100.0;
  EXPECT_NO_THROW(dict.validate());
}

TEST(PrivacyGranularity, ScalesWithCoverage) {
  const SegmentDictionary dict = make_dictionary(0.0, 500.0, 5);
  const auto lora = privacy_granularity(dict, 5000.0);
  EXPECT_DOUBLE_EQ(lora.absolute_m, 1000.0);
  EXPECT_DOUBLE_EQ(lora.normalized, 0.2);
  const auto xbee = privacy_granularity(dict, 500.0);
  EXPECT_DOUBLE_EQ(xbee.absolute_m, 100.0);
  EXPECT_DOUBLE_EQ(xbee.normalized, 0.2);  // same normalized privacy
}

TEST(PrivacyGranularity, SingleSegmentDisclosesNothing) {
  const auto g = privacy_granularity(make_dictionary(0.0, 500.0, 1), 500.0);
  EXPECT_DOUBLE_EQ(g.normalized, 1.0);
}
