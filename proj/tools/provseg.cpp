// provseg: configure and run spatial-provenance experiments, reproduce the
// published space/time table, and poke the rake codec on ad-hoc inputs.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "provseg/provseg.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Table1Point {
  std::uint16_t m;
  double ref_sparsity_pct;
  double ref_compressed_bits;
};

// Reference measurements for the three standard operating points
// (k = 8, H = 5, 5 segments, 2 vehicles each).
constexpr Table1Point kTable1Points[] = {
    {100, 20.92, 76.92},
    {125, 17.17, 86.34},
    {150, 14.58, 94.03},
};

constexpr double kTable1BitsTolerance = 2.0;

std::optional<std::uint64_t> env_master_seed() {
  const char* raw = std::getenv("PROVSEG_SEED");
  if (raw == nullptr) return std::nullopt;
  const std::string value(raw);
  if (value.empty()) throw provseg::ConfigError("PROVSEG_SEED: empty value");
  std::uint64_t out = 0;
  for (char c : value) {
    if (c < '0' || c > '9') throw provseg::ConfigError("PROVSEG_SEED: expected an unsigned integer");
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (out > (UINT64_MAX - digit) / 10) throw provseg::ConfigError("PROVSEG_SEED: value out of range");
    out = out * 10 + digit;
  }
  return out;
}

void print_summary(const provseg::ExperimentSummary& s, const provseg::PayloadProfile& profile,
                   bool swept) {
  const double analytic = provseg::expected_sparsity(s.m, s.k, s.hops) * 100.0;
  const long long field_bits = std::llround(s.avg_compressed_bits);
  std::printf("operating point     m=%u k=%u H=%zu r=%u%s\n", unsigned(s.m), unsigned(s.k), s.hops,
              s.rake_r, swept ? " (from sweep)" : "");
  std::printf("trials              %llu\n", static_cast<unsigned long long>(s.trials));
  std::printf("avg sparsity        %.2f %%  (analytic %.2f %%)\n", s.avg_sparsity * 100.0,
              analytic);
  std::printf("avg compressed size %.2f bits\n", s.avg_compressed_bits);
  std::printf("decode failure rate %.6f  (%llu ambiguity events, %llu budget failures)\n",
              s.decode_failure_rate, static_cast<unsigned long long>(s.ambiguity_events),
              static_cast<unsigned long long>(s.budget_failures));
  std::printf("codec time          %.3f us/hop virtual, %.3f us/hop wall\n", s.mean_codec_time_us,
              s.mean_codec_wall_us);
  std::printf("payload occupancy   %.1f %% of %s (%zu bytes)\n",
              provseg::payload_fraction(static_cast<std::size_t>(field_bits), profile),
              profile.name.c_str(), profile.payload_bytes);
}

int cmd_run(const std::string& config_path, unsigned jobs) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  provseg::ExperimentConfig cfg = provseg::parse_config(buffer.str());
  if (const auto seed = env_master_seed()) cfg.master_seed = *seed;

  const provseg::ExperimentResult result = provseg::run_experiment(cfg.to_plan(), jobs);
  print_summary(result.summary, cfg.payload_profile, !cfg.r.has_value());

  std::ofstream csv(cfg.output_path, std::ios::binary);
  if (!csv) {
    std::cerr << "error: cannot write CSV to '" << cfg.output_path << "'\n";
    return kExitRuntime;
  }
  provseg::write_csv_header(csv);
  provseg::write_csv_row(csv, result.summary);
  std::printf("csv written         %s\n", cfg.output_path.c_str());
  return 0;
}

int cmd_table1(std::uint64_t trials, unsigned jobs, const std::string& csv_path) {
  std::uint64_t master_seed = 42;
  if (const auto seed = env_master_seed()) master_seed = *seed;

  std::vector<provseg::ExperimentSummary> summaries;
  for (const Table1Point& point : kTable1Points) {
    provseg::ExperimentPlan plan;
    plan.bloom = {point.m, 8, 1};
    plan.rake_r.reset();  // discover the exponent per operating point
    plan.num_segments = 5;
    plan.hops = 5;
    plan.num_vehicles = 10;
    plan.road_length_m = 500.0;
    plan.trials = trials;
    plan.master_seed = master_seed;
    summaries.push_back(provseg::run_experiment(plan, jobs).summary);
  }

  std::printf("%4s %10s %10s %12s %9s %3s %7s\n", "m", "sparsity%", "analytic%", "compressed",
              "ref_bits", "r", "trials");
  bool any_gap = false;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const provseg::ExperimentSummary& s = summaries[i];
    const Table1Point& point = kTable1Points[i];
    const double analytic = provseg::expected_sparsity(s.m, s.k, s.hops) * 100.0;
    const double gap = s.avg_compressed_bits - point.ref_compressed_bits;
    const bool in_tolerance = std::abs(gap) <= kTable1BitsTolerance;
    any_gap = any_gap || !in_tolerance;
    std::printf("%4u %10.2f %10.2f %12.2f %9.2f %3u %7llu%s\n", unsigned(s.m),
                s.avg_sparsity * 100.0, analytic, s.avg_compressed_bits,
                point.ref_compressed_bits, s.rake_r,
                static_cast<unsigned long long>(s.trials),
                in_tolerance ? "" : "  GAP vs reference");
  }
  if (any_gap) {
    std::printf("note: swept exponents left at least one compressed-size mean more than %.1f bits\n"
                "      from the reference value; the generating rake width for that column is not\n"
                "      published, so the gap is reported rather than tuned away.\n",
                kTable1BitsTolerance);
  }

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
      std::cerr << "error: cannot write CSV to '" << csv_path << "'\n";
      return kExitRuntime;
    }
    provseg::write_csv_header(csv);
    for (const auto& s : summaries) provseg::write_csv_row(csv, s);
    std::printf("csv written         %s\n", csv_path.c_str());
  }
  return 0;
}

int cmd_codec(bool do_compress, unsigned m_bits, unsigned r, const std::string& hex) {
  const provseg::RakeParams params{r};
  params.validate_for(m_bits);
  const std::vector<std::uint8_t> bytes = provseg::parse_hex(hex);

  if (do_compress) {
    if (bytes.size() != (m_bits + 7) / 8) {
      throw std::invalid_argument("input must be exactly ceil(m/8) bytes");
    }
    const provseg::BitVec input = provseg::BitVec::from_bytes(bytes, m_bits);
    if (input.to_bytes() != bytes) {
      throw std::invalid_argument("pad bits beyond m must be zero");
    }
    const provseg::CompressedBits out = provseg::compress(input, params);
    std::printf("%s %zu\n", provseg::to_hex(out.payload.to_bytes()).c_str(), out.payload.size());
  } else {
    const provseg::BitVec out = provseg::decompress_padded(bytes, m_bits, params);
    std::printf("%s %zu\n", provseg::to_hex(out.to_bytes()).c_str(), out.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-preserving spatial provenance: Bloom-filter embedding with rake "
               "compression over multi-hop chains"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "key=value config file")->required();
  run->add_option("--jobs", jobs, "worker threads (default 1)");

  std::uint64_t trials = 10000;
  std::string table_csv;
  auto* table1 = app.add_subcommand("table1", "reproduce the three standard operating points");
  table1->add_option("--trials", trials, "trials per operating point (default 10000)");
  table1->add_option("--jobs", jobs, "worker threads (default 1)");
  table1->add_option("--csv", table_csv, "also write the rows to this CSV file");

  unsigned codec_m = 0;
  unsigned codec_r = 2;
  std::string codec_hex;
  auto* codec = app.add_subcommand("codec", "compress or decompress a bit string");
  codec->require_subcommand(1);
  auto add_codec_sub = [&](const char* name, const char* help) {
    auto* sub = codec->add_subcommand(name, help);
    sub->add_option("--m", codec_m, "bit length of the uncompressed string")->required();
    sub->add_option("--r", codec_r, "rake exponent (window = 2^r bits)")->required();
    sub->add_option("hex", codec_hex, "input bytes as hex")->required();
    return sub;
  };
  auto* codec_compress = add_codec_sub("compress", "raw bits -> rake payload");
  add_codec_sub("decompress", "rake payload -> raw bits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, jobs);
    if (*table1) return cmd_table1(trials, jobs, table_csv);
    return cmd_codec(codec_compress->parsed(), codec_m, codec_r, codec_hex);
  } catch (const provseg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const provseg::TruncatedPayload& e) {
    std::cerr << "TruncatedPayload: " << e.what() << "\n";
    return kExitUsage;
  } catch (const provseg::OverrunOutput& e) {
    std::cerr << "OverrunOutput: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
