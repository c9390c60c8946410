#ifndef PROVSEG_SIM_HPP
#define PROVSEG_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "provseg/bloom.hpp"
#include "provseg/packet.hpp"
#include "provseg/rake.hpp"
#include "provseg/rng.hpp"
#include "provseg/segment.hpp"

namespace provseg {

// Static chain: packets travel path[0] -> path[1] -> ... -> RSU. Routing is
// configured, not discovered.
struct Topology {
  std::vector<VehicleNode> nodes;
  std::vector<std::uint32_t> path;  // vehicle ids, uplink order
  SegmentDictionary dict;

  void validate() const {
    dict.validate();
    if (path.empty()) throw std::invalid_argument("Topology: path must have >= 1 hop");
    std::set<std::uint32_t> registered;
    for (const VehicleNode& n : nodes) registered.insert(n.vehicle_id);
    if (registered.size() != nodes.size()) {
      throw std::invalid_argument("Topology: vehicle ids must be distinct");
    }
    std::set<std::uint32_t> seen;
    for (std::uint32_t vid : path) {
      if (!registered.count(vid)) throw std::invalid_argument("Topology: path id not registered");
      if (!seen.insert(vid).second) throw std::invalid_argument("Topology: path ids must be distinct");
    }
  }

  const VehicleNode& node_by_id(std::uint32_t vid) const {
    for (const VehicleNode& n : nodes) {
      if (n.vehicle_id == vid) return n;
    }
    throw std::invalid_argument("Topology: unknown vehicle id");
  }

  std::vector<std::uint32_t> registered_ids() const {
    std::vector<std::uint32_t> ids;
    ids.reserve(nodes.size());
    for (const VehicleNode& n : nodes) ids.push_back(n.vehicle_id);
    return ids;
  }
};

struct TrialMetrics {
  std::vector<std::uint32_t> lit_bits_per_hop;
  std::vector<std::uint32_t> compressed_bits_per_hop;
  bool decode_ok = false;
  std::uint32_t ambiguity_count = 0;     // decoded (vehicle, segment) pairs never embedded
  double codec_time_per_hop = 0.0;       // measured wall seconds, mean over hops
  std::uint64_t codec_work_units = 0;    // deterministic operation count, all hops
  bool budget_exceeded = false;
  bool false_negative = false;  // an embedded pair failed to decode (must never happen)
};

struct ExperimentSummary {
  // operating point
  std::uint16_t m = 0;
  std::uint8_t k = 0;
  std::size_t hops = 0;
  unsigned rake_r = 0;
  std::uint64_t trials = 0;
  // metrics
  double avg_sparsity = 0.0;         // fraction of bits lit, averaged per the hop rule
  double avg_compressed_bits = 0.0;  // mean provenance field size per hop
  double decode_failure_rate = 0.0;
  double mean_codec_time_us = 0.0;  // virtual time: work units at the nominal op cost
  double mean_codec_wall_us = 0.0;  // measured wall clock, informational
  std::uint64_t ambiguity_events = 0;
  std::uint64_t budget_failures = 0;
};

// Nominal cost of one primitive codec operation. Virtual time keeps summaries
// and CSV output reproducible for a fixed master seed; wall-clock timing is
// reported alongside but never feeds the deterministic outputs.
inline constexpr double kSecondsPerWorkUnit = 10e-9;

// Fisher-Yates with an explicit generator.
template <typename T>
void shuffle_in_place(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Fresh per-trial deployment: vehicles spread evenly over the segments with
// random network ids and positions, path visiting one vehicle per segment in
// random order (cycling over segments when the path is longer).
inline Topology make_random_topology(const SegmentDictionary& dict, std::size_t num_vehicles,
                                     std::size_t hops, SplitMix64& rng) {
  dict.validate();
  const std::size_t s = dict.num_segments();
  if (num_vehicles < s) {
    throw std::invalid_argument("make_random_topology: need at least one vehicle per segment");
  }
  if (hops > num_vehicles) {
    throw std::invalid_argument("make_random_topology: path longer than the vehicle count");
  }

  Topology topo;
  topo.dict = dict;
  std::set<std::uint32_t> used_ids;
  std::vector<std::vector<std::size_t>> by_segment(s);
  const double seg_len = dict.road_length_m / static_cast<double>(s);
  for (std::size_t v = 0; v < num_vehicles; ++v) {
    const std::size_t seg = v % s;
    std::uint32_t vid;
    do {
      vid = static_cast<std::uint32_t>(rng.next_u64());
    } while (!used_ids.insert(vid).second);
    const double lo = dict.road_origin_m + seg_len * static_cast<double>(seg);
    double pos;
    do {
      pos = lo + rng.next_unit() * seg_len;
    } while (dict.try_segment_index(pos) != seg);
    by_segment[seg].push_back(topo.nodes.size());
    topo.nodes.push_back({vid, pos});
  }

  std::vector<std::size_t> seg_order(s);
  for (std::size_t i = 0; i < s; ++i) seg_order[i] = i;
  shuffle_in_place(seg_order, rng);

  for (std::size_t h = 0; h < hops; ++h) {
    auto& bucket = by_segment[seg_order[h % s]];
    if (bucket.empty()) {
      throw std::invalid_argument("make_random_topology: segment exhausted while building path");
    }
    const std::size_t pick = rng.next_below(static_cast<std::uint32_t>(bucket.size()));
    topo.path.push_back(topo.nodes[bucket[pick]].vehicle_id);
    bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  topo.validate();
  return topo;
}

// One full protocol round: dictionary broadcast, H embed-and-forward steps
// with a wire round trip per hop, then RSU-side decode. Passing no rake
// parameters runs the uncompressed baseline. A budget overflow marks the
// trial failed rather than dropping it.
inline TrialMetrics run_trial(const Topology& topology, const BloomParams& params,
                              const std::optional<RakeParams>& rake, std::uint64_t rng_seed,
                              const PayloadProfile& profile = PayloadProfile::zigbee()) {
  topology.validate();
  params.validate();

  // Broadcast phase: nodes take the session configuration from the record.
  const BroadcastRecord record = parse_broadcast(serialize_broadcast(
      {topology.dict, params, static_cast<std::uint8_t>(rake ? rake->r : 0)}));
  const SegmentDictionary& dict = record.dict;

  // App bytes ride their own substream so topology draws are not replayed.
  SplitMix64 rng(derive_stream_seed(rng_seed, 0xA55));
  std::vector<std::uint8_t> app_payload(16);
  for (auto& b : app_payload) b = static_cast<std::uint8_t>(rng.next_u64());

  const std::size_t hops = topology.path.size();

  TrialMetrics metrics;
  metrics.lit_bits_per_hop.reserve(hops);
  metrics.compressed_bits_per_hop.reserve(hops);

  double wall_total = 0.0;
  bool failed = false;
  ProvenancePacket packet;
  try {
    packet = rake ? make_initial_packet(app_payload, params, *rake, profile)
                  : make_initial_packet_uncompressed(app_payload, params, profile);
    for (std::size_t h = 0; h < hops; ++h) {
      packet = parse_packet(serialize_packet(packet), params);
      const VehicleNode& node = topology.node_by_id(topology.path[h]);
      HopStats stats;
      packet = rake ? embed_and_forward(packet, node, dict, *rake, profile, &stats)
                    : forward_uncompressed(packet, node, dict, profile, &stats);
      metrics.lit_bits_per_hop.push_back(static_cast<std::uint32_t>(stats.lit_after));
      metrics.compressed_bits_per_hop.push_back(static_cast<std::uint32_t>(stats.field_bits));
      metrics.codec_work_units += stats.codec_work_units;
      wall_total += stats.codec_wall_seconds;
    }
  } catch (const BudgetExceeded&) {
    metrics.budget_exceeded = true;
    failed = true;
    while (metrics.lit_bits_per_hop.size() < hops) {
      metrics.lit_bits_per_hop.push_back(
          metrics.lit_bits_per_hop.empty() ? 0 : metrics.lit_bits_per_hop.back());
      metrics.compressed_bits_per_hop.push_back(
          metrics.compressed_bits_per_hop.empty() ? 0 : metrics.compressed_bits_per_hop.back());
    }
  }
  metrics.codec_time_per_hop = wall_total / static_cast<double>(hops);

  if (!failed) {
    packet = parse_packet(serialize_packet(packet), params);
    BloomFilter filter =
        rake ? BloomFilter::from_bits(params, decompress({packet.prov, params.m}, *rake))
             : BloomFilter::from_bits(params, packet.prov);

    const DecodeReport report = decode_provenance(filter, topology.registered_ids(), dict);
    std::size_t found_true = 0;
    for (std::uint32_t vid : topology.path) {
      const VehicleNode& node = topology.node_by_id(vid);
      const auto& segs = report.segments.at(vid);
      if (segs.count(dict.segment_of(node.position_m))) {
        ++found_true;
      } else {
        metrics.false_negative = true;
      }
    }
    metrics.ambiguity_count = static_cast<std::uint32_t>(report.decoded_pair_count() - found_true);
    metrics.decode_ok = !metrics.false_negative && metrics.ambiguity_count == 0;
  }
  return metrics;
}

// Analytic oracle for the sparsity metric: mean expected occupancy of the
// filter measured after each of the H insertions.
inline double expected_sparsity(std::size_t m, std::size_t k, std::size_t hops) {
  if (m < 1 || k < 1 || hops < 1) {
    throw std::invalid_argument("expected_sparsity: arguments must be positive");
  }
  double sum = 0.0;
  for (std::size_t j = 1; j <= hops; ++j) {
    sum += 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(m),
                          static_cast<double>(j) * static_cast<double>(k));
  }
  return sum / static_cast<double>(hops);
}

inline double avg_sparsity(const std::vector<TrialMetrics>& metrics, std::size_t m) {
  if (metrics.empty()) throw std::invalid_argument("avg_sparsity: no trials");
  std::uint64_t lit_sum = 0;
  std::uint64_t hop_count = 0;
  for (const TrialMetrics& t : metrics) {
    for (std::uint32_t lit : t.lit_bits_per_hop) lit_sum += lit;
    hop_count += t.lit_bits_per_hop.size();
  }
  return static_cast<double>(lit_sum) / (static_cast<double>(hop_count) * static_cast<double>(m));
}

inline double avg_compressed_size(const std::vector<TrialMetrics>& metrics) {
  if (metrics.empty()) throw std::invalid_argument("avg_compressed_size: no trials");
  std::uint64_t bits_sum = 0;
  std::uint64_t hop_count = 0;
  for (const TrialMetrics& t : metrics) {
    for (std::uint32_t bits : t.compressed_bits_per_hop) bits_sum += bits;
    hop_count += t.compressed_bits_per_hop.size();
  }
  return static_cast<double>(bits_sum) / static_cast<double>(hop_count);
}

struct ExperimentPlan {
  BloomParams bloom;
  std::optional<unsigned> rake_r;  // empty: discover via sweep_rake_param
  std::uint16_t num_segments = 5;
  std::size_t hops = 5;
  std::size_t num_vehicles = 10;
  double road_origin_m = 0.0;
  double road_length_m = 500.0;
  PayloadProfile profile = PayloadProfile::zigbee();
  std::uint64_t trials = 10000;
  std::uint64_t master_seed = 42;

  void validate() const {
    bloom.validate();
    if (rake_r) RakeParams{*rake_r}.validate_for(bloom.m);
    if (num_segments < 1) throw std::invalid_argument("plan: num_segments must be >= 1");
    if (hops < 1) throw std::invalid_argument("plan: hops must be >= 1");
    if (!(road_length_m > 0.0)) throw std::invalid_argument("plan: road_length must be > 0");
    if (num_vehicles < num_segments) {
      throw std::invalid_argument("plan: need at least one vehicle per segment");
    }
    if (hops > num_vehicles) throw std::invalid_argument("plan: hops exceed vehicle count");
    const std::size_t visits_per_segment = (hops + num_segments - 1) / num_segments;
    if (visits_per_segment > num_vehicles / num_segments) {
      throw std::invalid_argument("plan: not enough vehicles per segment for the path");
    }
    if (trials < 1) throw std::invalid_argument("plan: trials must be >= 1");
  }

  SegmentDictionary dictionary() const {
    return make_dictionary(road_origin_m, road_length_m, num_segments);
  }

  std::vector<double> expected_density_profile() const {
    std::vector<double> profile_out(hops);
    for (std::size_t j = 1; j <= hops; ++j) {
      profile_out[j - 1] = 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(bloom.m),
                                          static_cast<double>(j) * static_cast<double>(bloom.k));
    }
    return profile_out;
  }
};

inline std::vector<unsigned> default_rake_candidates(std::size_t m) {
  std::vector<unsigned> candidates;
  for (unsigned r : {1u, 2u, 3u, 4u}) {
    if ((1u << r) <= m) candidates.push_back(r);
  }
  return candidates;
}

inline unsigned resolve_rake_exponent(const ExperimentPlan& plan) {
  if (plan.rake_r) return *plan.rake_r;
  return sweep_rake_param(plan.expected_density_profile(), plan.bloom.m,
                          default_rake_candidates(plan.bloom.m));
}

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<TrialMetrics> metrics;
};

namespace detail {

inline ExperimentSummary summarize(const ExperimentPlan& plan, unsigned rake_r,
                                   const std::vector<TrialMetrics>& metrics) {
  ExperimentSummary s;
  s.m = plan.bloom.m;
  s.k = plan.bloom.k;
  s.hops = plan.hops;
  s.rake_r = rake_r;
  s.trials = metrics.size();
  std::uint64_t work_sum = 0;
  std::uint64_t failures = 0;
  double wall_sum = 0.0;
  for (const TrialMetrics& t : metrics) {
    work_sum += t.codec_work_units;
    wall_sum += t.codec_time_per_hop;
    if (!t.decode_ok) ++failures;
    s.ambiguity_events += t.ambiguity_count;
    if (t.budget_exceeded) ++s.budget_failures;
  }
  const double hop_count = static_cast<double>(s.trials) * static_cast<double>(plan.hops);
  s.avg_sparsity = avg_sparsity(metrics, plan.bloom.m);
  s.avg_compressed_bits = avg_compressed_size(metrics);
  s.decode_failure_rate = static_cast<double>(failures) / static_cast<double>(s.trials);
  s.mean_codec_time_us = static_cast<double>(work_sum) / hop_count * kSecondsPerWorkUnit * 1e6;
  s.mean_codec_wall_us = wall_sum / static_cast<double>(s.trials) * 1e6;
  return s;
}

// Runs fn(trial_index) across jobs threads; the reduction stays in trial
// order, so the worker count never changes any result.
template <typename Fn>
void for_each_trial(std::uint64_t trials, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || trials < 2) {
    for (std::uint64_t i = 0; i < trials; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(jobs, trials));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < trials; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentPlan& plan, unsigned jobs = 1) {
  plan.validate();
  const unsigned rake_r = resolve_rake_exponent(plan);
  RakeParams{rake_r}.validate_for(plan.bloom.m);
  const SegmentDictionary dict = plan.dictionary();

  ExperimentResult result;
  result.metrics.resize(plan.trials);
  detail::for_each_trial(plan.trials, jobs, [&](std::uint64_t i) {
    const std::uint64_t trial_seed = derive_stream_seed(plan.master_seed, i);
    SplitMix64 rng(trial_seed);
    const Topology topo = make_random_topology(dict, plan.num_vehicles, plan.hops, rng);
    result.metrics[i] = run_trial(topo, plan.bloom, RakeParams{rake_r}, trial_seed, plan.profile);
  });
  result.summary = detail::summarize(plan, rake_r, result.metrics);
  return result;
}

struct DelayComparison {
  double mean_hop_wall_us_rake = 0.0;
  double mean_hop_wall_us_baseline = 0.0;
  double mean_field_bits_rake = 0.0;
  double mean_field_bits_baseline = 0.0;
  double mean_hop_work_rake = 0.0;
  double mean_hop_work_baseline = 0.0;
};

inline DelayComparison delay_overhead(const std::vector<TrialMetrics>& with_rake,
                                      const std::vector<TrialMetrics>& without) {
  if (with_rake.empty() || with_rake.size() != without.size()) {
    throw std::invalid_argument("delay_overhead: runs must pair trial for trial");
  }
  DelayComparison cmp;
  std::uint64_t hops_rake = 0;
  std::uint64_t hops_base = 0;
  for (const TrialMetrics& t : with_rake) {
    cmp.mean_hop_wall_us_rake += t.codec_time_per_hop * 1e6;
    cmp.mean_hop_work_rake += static_cast<double>(t.codec_work_units);
    hops_rake += t.compressed_bits_per_hop.size();
  }
  for (const TrialMetrics& t : without) {
    cmp.mean_hop_wall_us_baseline += t.codec_time_per_hop * 1e6;
    cmp.mean_hop_work_baseline += static_cast<double>(t.codec_work_units);
    hops_base += t.compressed_bits_per_hop.size();
  }
  const double n = static_cast<double>(with_rake.size());
  cmp.mean_hop_wall_us_rake /= n;
  cmp.mean_hop_wall_us_baseline /= n;
  cmp.mean_hop_work_rake /= static_cast<double>(hops_rake);
  cmp.mean_hop_work_baseline /= static_cast<double>(hops_base);
  cmp.mean_field_bits_rake = avg_compressed_size(with_rake);
  cmp.mean_field_bits_baseline = avg_compressed_size(without);
  return cmp;
}

// Paired run over identical topologies and app payloads, with and without
// the codec.
inline std::pair<ExperimentResult, ExperimentResult> run_paired_experiment(
    const ExperimentPlan& plan, unsigned jobs = 1) {
  plan.validate();
  const unsigned rake_r = resolve_rake_exponent(plan);
  RakeParams{rake_r}.validate_for(plan.bloom.m);
  const SegmentDictionary dict = plan.dictionary();

  ExperimentResult with_rake;
  ExperimentResult baseline;
  with_rake.metrics.resize(plan.trials);
  baseline.metrics.resize(plan.trials);
  detail::for_each_trial(plan.trials, jobs, [&](std::uint64_t i) {
    const std::uint64_t trial_seed = derive_stream_seed(plan.master_seed, i);
    SplitMix64 rng(trial_seed);
    const Topology topo = make_random_topology(dict, plan.num_vehicles, plan.hops, rng);
    with_rake.metrics[i] = run_trial(topo, plan.bloom, RakeParams{rake_r}, trial_seed, plan.profile);
    baseline.metrics[i] = run_trial(topo, plan.bloom, std::nullopt, trial_seed, plan.profile);
  });
  with_rake.summary = detail::summarize(plan, rake_r, with_rake.metrics);
  baseline.summary = detail::summarize(plan, rake_r, baseline.metrics);
  return {std::move(with_rake), std::move(baseline)};
}

// CSV export. Every field below is a pure function of the master seed and the
// plan, so a fixed seed reproduces the file byte for byte.
inline void write_csv_header(std::ostream& os) {
  os << "m,k,H,r,trials,avg_sparsity_pct,avg_compressed_bits,decode_failure_rate,"
        "mean_codec_time_us\n";
}

inline void write_csv_row(std::ostream& os, const ExperimentSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%u,%u,%zu,%u,%llu,%.2f,%.2f,%.6f,%.3f\n",
                static_cast<unsigned>(s.m), static_cast<unsigned>(s.k), s.hops, s.rake_r,
                static_cast<unsigned long long>(s.trials), s.avg_sparsity * 100.0,
                s.avg_compressed_bits, s.decode_failure_rate, s.mean_codec_time_us);
  os << buf;
}

}  // namespace provseg

#endif  // PROVSEG_SIM_HPP
