#include <gtest/gtest.h>

#include <string>

#include "provseg/config.hpp"

using namespace provseg;

namespace {

const char* kValidConfig =
    "# standard operating point\n"
    "m = 100\n"
    "k = 8\n"
    "seed = 1\n"
    "r = sweep\n"
    "S = 5\n"
    "H = 5\n"
    "num_vehicles = 10\n"
    "road_length_m = 500\n"
    "payload_profile = zigbee\n"
    "trials = 10000\n"
    "master_seed = 42\n"
    "output_path = results.csv\n";

std::string with_line(const std::string& base, const std::string& find,
                      const std::string& replace) {
  std::string out = base;
  const auto pos = out.find(find);
  EXPECT_NE(pos, std::string::npos);
  out.replace(pos, find.size(), replace);
  return out;
}

}  // namespace

TEST(Config, ParsesValidFile) {
  const ExperimentConfig cfg = parse_config(kValidConfig);
  EXPECT_EQ(cfg.m, 100);
  EXPECT_EQ(cfg.k, 8);
  EXPECT_FALSE(cfg.r.has_value());
  EXPECT_EQ(cfg.S, 5);
  EXPECT_EQ(cfg.H, 5u);
  EXPECT_EQ(cfg.num_vehicles, 10u);
  EXPECT_DOUBLE_EQ(cfg.road_length_m, 500.0);
  EXPECT_EQ(cfg.payload_profile, PayloadProfile::zigbee());
  EXPECT_EQ(cfg.trials, 10000u);
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_EQ(cfg.output_path, "results.csv");
}

TEST(Config, SerializeParseRoundTrip) {
  ExperimentConfig cfg = parse_config(kValidConfig);
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);

  cfg.r = 3;
  cfg.payload_profile = PayloadProfile::lora();
  cfg.road_length_m = 1234.5;
  cfg.m = 150;
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);

  cfg.payload_profile = PayloadProfile::custom(96);
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, MissingKeyNamesField) {
  const std::string text = with_line(kValidConfig, "trials = 10000\n", "");
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("trials"), std::string::npos);
  }
}

TEST(Config, InvariantViolationsRejected) {
  // k > m breaks the filter invariant
  EXPECT_THROW(parse_config(with_line(kValidConfig, "m = 100", "m = 4")), ConfigError);
  // rake width exceeding m
  EXPECT_THROW(parse_config(with_line(kValidConfig, "r = sweep", "r = 12")), ConfigError);
  // path longer than the fleet
  EXPECT_THROW(parse_config(with_line(kValidConfig, "H = 5", "H = 11")), ConfigError);
  // fewer vehicles than segments
  EXPECT_THROW(parse_config(with_line(kValidConfig, "num_vehicles = 10", "num_vehicles = 4")),
               ConfigError);
  EXPECT_THROW(parse_config(with_line(kValidConfig, "trials = 10000", "trials = 0")), ConfigError);
}

TEST(Config, DiagnosticsCarryLineNumbers) {
  try {
    parse_config(with_line(kValidConfig, "k = 8", "k = eight"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("k"), std::string::npos);
  }
}

TEST(Config, RejectsMalformedLines) {
  EXPECT_THROW(parse_config(std::string(kValidConfig) + "m = 100\n"), ConfigError);  // duplicate
  EXPECT_THROW(parse_config(std::string(kValidConfig) + "bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kValidConfig) + "just words\n"), ConfigError);
  EXPECT_THROW(parse_config(with_line(kValidConfig, "trials = 10000", "trials = -4")),
               ConfigError);
  EXPECT_THROW(parse_config(with_line(kValidConfig, "payload_profile = zigbee",
                                      "payload_profile = carrier-pigeon")),
               ConfigError);
}

TEST(Config, CommentsAndWhitespaceTolerated) {
  std::string text;
  text += "  m=100   # inline comment\n\n";
  text += "\tk =\t8\n";
  text += "seed=1\nr=2\nS=5\nH=5\nnum_vehicles=10\nroad_length_m=500.0\n";
  text += "payload_profile=lora\ntrials=5\nmaster_seed=9\noutput_path=out.csv\n";
  const ExperimentConfig cfg = parse_config(text);
  EXPECT_EQ(cfg.m, 100);
  EXPECT_EQ(cfg.r, 2u);
  EXPECT_EQ(cfg.payload_profile, PayloadProfile::lora());
}

TEST(Config, PlanMapping) {
  const ExperimentConfig cfg = parse_config(kValidConfig);
  const ExperimentPlan plan = cfg.to_plan();
  EXPECT_EQ(plan.bloom.m, 100);
  EXPECT_EQ(plan.bloom.k, 8);
  EXPECT_EQ(plan.bloom.seed, 1u);
  EXPECT_EQ(plan.hops, 5u);
  EXPECT_EQ(plan.num_segments, 5);
  EXPECT_EQ(plan.trials, 10000u);
  EXPECT_NO_THROW(plan.validate());
}
