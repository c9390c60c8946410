#ifndef PROVSEG_CONFIG_HPP
#define PROVSEG_CONFIG_HPP

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "provseg/packet.hpp"
#include "provseg/sim.hpp"

namespace provseg {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

// Flat key=value experiment description. '#' starts a comment, keys are
// required exactly once, and every protocol invariant is re-checked at load.
struct ExperimentConfig {
  std::uint16_t m = 100;
  std::uint8_t k = 8;
  std::uint64_t seed = 1;               // bloom hash seed (session)
  std::optional<unsigned> r;            // empty: sweep
  std::uint16_t S = 5;
  std::size_t H = 5;
  std::size_t num_vehicles = 10;
  double road_length_m = 500.0;
  PayloadProfile payload_profile = PayloadProfile::zigbee();
  std::uint64_t trials = 10000;
  std::uint64_t master_seed = 42;
  std::string output_path = "results.csv";

  bool operator==(const ExperimentConfig&) const = default;

  ExperimentPlan to_plan() const {
    ExperimentPlan plan;
    plan.bloom = {m, k, seed};
    plan.rake_r = r;
    plan.num_segments = S;
    plan.hops = H;
    plan.num_vehicles = num_vehicles;
    plan.road_length_m = road_length_m;
    plan.profile = payload_profile;
    plan.trials = trials;
    plan.master_seed = master_seed;
    return plan;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(ws);
  return std::string(s.substr(begin, end - begin + 1));
}

inline std::uint64_t parse_u64(int line, const std::string& field, const std::string& value,
                               std::uint64_t max) {
  if (value.empty()) throw ConfigError(line, field + ": empty value");
  std::uint64_t out = 0;
  for (char c : value) {
    if (c < '0' || c > '9') throw ConfigError(line, field + ": expected an unsigned integer");
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (out > (UINT64_MAX - digit) / 10) throw ConfigError(line, field + ": value out of range");
    out = out * 10 + digit;
  }
  if (out > max) {
    throw ConfigError(line, field + ": value exceeds " + std::to_string(max));
  }
  return out;
}

inline double parse_positive_double(int line, const std::string& field, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    if (!(out > 0.0)) throw ConfigError(line, field + ": must be > 0");
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(line, field + ": expected a number");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t eol = text.find('\n', start);
    std::string_view raw =
        text.substr(start, eol == std::string_view::npos ? text.size() - start : eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string stripped = detail::trim(raw.substr(0, raw.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected key = value");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    if (!seen.emplace(key, line_no).second) {
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    }

    if (key == "m") {
      cfg.m = static_cast<std::uint16_t>(detail::parse_u64(line_no, key, value, 0xFFFF));
    } else if (key == "k") {
      cfg.k = static_cast<std::uint8_t>(detail::parse_u64(line_no, key, value, 0xFF));
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(line_no, key, value, UINT64_MAX);
    } else if (key == "r") {
      if (value == "sweep") {
        cfg.r.reset();
      } else {
        cfg.r = static_cast<unsigned>(detail::parse_u64(line_no, key, value, 16));
      }
    } else if (key == "S") {
      cfg.S = static_cast<std::uint16_t>(detail::parse_u64(line_no, key, value, 0xFFFF));
    } else if (key == "H") {
      cfg.H = detail::parse_u64(line_no, key, value, 1000000);
    } else if (key == "num_vehicles") {
      cfg.num_vehicles = detail::parse_u64(line_no, key, value, 1000000);
    } else if (key == "road_length_m") {
      cfg.road_length_m = detail::parse_positive_double(line_no, key, value);
    } else if (key == "payload_profile") {
      if (value == "zigbee") {
        cfg.payload_profile = PayloadProfile::zigbee();
      } else if (value == "lora") {
        cfg.payload_profile = PayloadProfile::lora();
      } else {
        cfg.payload_profile =
            PayloadProfile::custom(detail::parse_u64(line_no, key, value, 65535));
      }
    } else if (key == "trials") {
      cfg.trials = detail::parse_u64(line_no, key, value, UINT64_MAX);
    } else if (key == "master_seed") {
      cfg.master_seed = detail::parse_u64(line_no, key, value, UINT64_MAX);
    } else if (key == "output_path") {
      if (value.empty()) throw ConfigError(line_no, "output_path: empty value");
      cfg.output_path = value;
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }

  static const char* required[] = {"m",       "k",     "seed",          "r",
                                   "S",       "H",     "num_vehicles",  "road_length_m",
                                   "payload_profile", "trials", "master_seed", "output_path"};
  for (const char* key : required) {
    if (!seen.count(key)) {
      throw ConfigError(std::string("missing required key '") + key + "'");
    }
  }

  try {
    cfg.to_plan().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  char road[64];
  std::snprintf(road, sizeof(road), "%.17g", cfg.road_length_m);
  std::string out;
  out += "m = " + std::to_string(cfg.m) + "\n";
  out += "k = " + std::to_string(cfg.k) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "r = " + (cfg.r ? std::to_string(*cfg.r) : std::string("sweep")) + "\n";
  out += "S = " + std::to_string(cfg.S) + "\n";
  out += "H = " + std::to_string(cfg.H) + "\n";
  out += "num_vehicles = " + std::to_string(cfg.num_vehicles) + "\n";
  out += "road_length_m = " + std::string(road) + "\n";
  out += "payload_profile = " + cfg.payload_profile.name + "\n";
  out += "trials = " + std::to_string(cfg.trials) + "\n";
  out += "master_seed = " + std::to_string(cfg.master_seed) + "\n";
  out += "output_path = " + cfg.output_path + "\n";
  return out;
}

}  // namespace provseg

#endif  // PROVSEG_CONFIG_HPP
