#ifndef PROVSEG_SEGMENT_HPP
#define PROVSEG_SEGMENT_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace provseg {

class OutOfCoverage : public std::runtime_error {
 public:
  explicit OutOfCoverage(double position)
      : std::runtime_error("position " + std::to_string(position) +
                           " m is outside the dictionary's road interval") {}
};

// RSU-chosen partition of [road_origin, road_origin + road_length) into
// equal half-open intervals. The number of segments is the privacy
// granularity the vehicles agreed to.
struct SegmentDictionary {
  double road_origin_m = 0.0;
  double road_length_m = 0.0;
  std::vector<std::uint16_t> segment_ids;

  std::size_t num_segments() const { return segment_ids.size(); }

  void validate() const {
    if (segment_ids.empty()) throw std::invalid_argument("SegmentDictionary: needs >= 1 segment");
    if (!(road_length_m > 0.0)) {
      throw std::invalid_argument("SegmentDictionary: road_length must be > 0");
    }
    std::set<std::uint16_t> distinct(segment_ids.begin(), segment_ids.end());
    if (distinct.size() != segment_ids.size()) {
      throw std::invalid_argument("SegmentDictionary: segment ids must be distinct");
    }
  }

  std::optional<std::size_t> try_segment_index(double position_m) const {
    const std::size_t s = num_segments();
    if (position_m < road_origin_m || position_m >= road_origin_m + road_length_m) {
      return std::nullopt;
    }
    const double scaled = (position_m - road_origin_m) * static_cast<double>(s) / road_length_m;
    std::size_t index = static_cast<std::size_t>(scaled);
    if (index >= s) index = s - 1;  // rounding guard at the top edge
    return index;
  }

  // Index of the interval containing `position`; exact boundaries belong to
  // the higher interval (half-open rule).
  std::size_t segment_index_of(double position_m) const {
    const auto index = try_segment_index(position_m);
    if (!index) throw OutOfCoverage(position_m);
    return *index;
  }

  std::uint16_t segment_of(double position_m) const {
    return segment_ids[segment_index_of(position_m)];
  }

  bool operator==(const SegmentDictionary&) const = default;
};

inline SegmentDictionary make_dictionary(double road_origin_m, double road_length_m,
                                         std::uint16_t num_segments) {
  SegmentDictionary dict;
  dict.road_origin_m = road_origin_m;
  dict.road_length_m = road_length_m;
  dict.segment_ids.resize(num_segments);
  for (std::uint16_t i = 0; i < num_segments; ++i) dict.segment_ids[i] = i;
  dict.validate();
  return dict;
}

struct VehicleNode {
  std::uint32_t vehicle_id = 0;
  double position_m = 0.0;  // static testbed: positions are configured, not sensed
};

struct PrivacyGranularity {
  double absolute_m = 0.0;  // location uncertainty in meters
  double normalized = 0.0;  // 1/S, technology-independent
};

// Absolute privacy scales with the radio's coverage; normalized privacy is
// the same for any technology at equal segment count.
inline PrivacyGranularity privacy_granularity(const SegmentDictionary& dict,
                                              double coverage_length_m) {
  dict.validate();
  const double s = static_cast<double>(dict.num_segments());
  return {coverage_length_m / s, 1.0 / s};
}

}  // namespace provseg

#endif  // PROVSEG_SEGMENT_HPP
