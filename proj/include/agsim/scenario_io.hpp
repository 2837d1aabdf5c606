#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "agsim/errors.hpp"
#include "agsim/simcore.hpp"

namespace agsim {

// A scenario document: the scenario itself plus the default seed list the
// file ships with (CLI flags can override the seeds).
struct ScenarioDoc {
  std::string name;
  Scenario scenario;
  std::vector<std::uint64_t> seeds;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void parse_fail(std::string_view name, int line,
                                    const std::string& message) {
  std::ostringstream out;
  out << name << ":" << line << ": " << message;
  throw ParseError(out.str());
}

inline double parse_double(std::string_view token, std::string_view name,
                           int line, std::string_view key) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    parse_fail(name, line,
               "invalid number '" + std::string(token) + "' for key '" +
                   std::string(key) + "'");
  return value;
}

inline long parse_long(std::string_view token, std::string_view name, int line,
                       std::string_view key) {
  long value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    parse_fail(name, line,
               "invalid integer '" + std::string(token) + "' for key '" +
                   std::string(key) + "'");
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Seed tokens are either plain integers or inclusive ranges "a..b".
inline void parse_seed_token(std::string_view token, std::string_view name,
                             int line, std::vector<std::uint64_t>& seeds) {
  const auto dots = token.find("..");
  auto parse_u64 = [&](std::string_view part) {
    std::uint64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      parse_fail(name, line, "invalid seed '" + std::string(token) + "'");
    return value;
  };
  if (dots == std::string_view::npos) {
    seeds.push_back(parse_u64(token));
    return;
  }
  const std::uint64_t lo = parse_u64(token.substr(0, dots));
  const std::uint64_t hi = parse_u64(token.substr(dots + 2));
  if (hi < lo)
    parse_fail(name, line, "seed range '" + std::string(token) + "' is empty");
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
}

}  // namespace detail

// Parses the sectioned key=value scenario format. '#' starts a comment.
// Unknown sections and keys are rejected by name; nodes.ue, nodes.uav and
// radio.frequency_hz are required, everything else falls back to the
// Scenario defaults. The assembled scenario is validated before return.
inline ScenarioDoc parse_scenario_text(std::string_view text,
                                       std::string_view name) {
  using detail::parse_fail;

  static const std::map<std::string, std::set<std::string>> kSchema = {
      {"nodes", {"ue", "uav"}},
      {"buildings", {"box"}},
      {"radio",
       {"frequency_hz", "tx_power_dbm", "antenna_gain_tx_dbi",
        "antenna_gain_rx_dbi", "channel_width_hz", "noise_figure_db",
        "phy_rate_bps"}},
      {"obstacle_params",
       {"wall_loss_db", "walls_per_building", "shadowing_sigma_los_db",
        "shadowing_sigma_nlos_db"}},
      {"error_params",
       {"snr_mid_db", "steepness_db", "max_retries",
        "per_attempt_overhead_s"}},
      {"traffic",
       {"mode", "offered_load_bps", "packet_bytes", "queue_capacity_packets",
        "tcp_window_packets", "tcp_rto_multiplier", "tcp_max_retransmits"}},
      {"timing", {"warmup_s", "measure_s"}},
      {"seeds", {"list"}},
  };

  ScenarioDoc doc;
  doc.name = std::string(name);
  Scenario& sc = doc.scenario;

  std::string section;
  std::set<std::string> seen_keys;
  bool have_ue = false, have_uav = false, have_frequency = false;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    std::string_view sv = raw;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos)
      sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;

    if (sv.front() == '[') {
      if (sv.back() != ']')
        parse_fail(name, line, "unterminated section header");
      section = std::string(detail::trim(sv.substr(1, sv.size() - 2)));
      if (!kSchema.contains(section))
        parse_fail(name, line, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      parse_fail(name, line, "expected 'key = value'");
    if (section.empty())
      parse_fail(name, line, "key outside any section");
    const std::string key{detail::trim(sv.substr(0, eq))};
    const std::string_view value = detail::trim(sv.substr(eq + 1));
    if (!kSchema.at(section).contains(key))
      parse_fail(name, line,
                 "unknown key '" + key + "' in section [" + section + "]");

    const std::string qualified = section + "." + key;
    const bool repeatable = qualified == "buildings.box";
    if (!repeatable && !seen_keys.insert(qualified).second)
      parse_fail(name, line, "duplicate key '" + qualified + "'");

    auto number = [&] { return detail::parse_double(value, name, line, key); };
    auto integer = [&] { return detail::parse_long(value, name, line, key); };
    auto point = [&] {
      const auto parts = detail::split_ws(value);
      if (parts.size() != 3)
        parse_fail(name, line, "key '" + key + "' needs 3 values: x y z");
      return Point3{detail::parse_double(parts[0], name, line, key),
                    detail::parse_double(parts[1], name, line, key),
                    detail::parse_double(parts[2], name, line, key)};
    };

    if (qualified == "nodes.ue") {
      sc.ue_pos = point();
      have_ue = true;
    } else if (qualified == "nodes.uav") {
      sc.uav_pos = point();
      have_uav = true;
    } else if (qualified == "buildings.box") {
      const auto parts = detail::split_ws(value);
      if (parts.size() != 6)
        parse_fail(name, line,
                   "'box' needs 6 values: xmin xmax ymin ymax zmin zmax");
      double v[6];
      for (int i = 0; i < 6; ++i)
        v[i] = detail::parse_double(parts[i], name, line, key);
      sc.buildings.push_back(
          Box{{v[0], v[2], v[4]}, {v[1], v[3], v[5]}});
    } else if (qualified == "radio.frequency_hz") {
      sc.radio.frequency_hz = number();
      have_frequency = true;
    } else if (qualified == "radio.tx_power_dbm") {
      sc.radio.tx_power_dbm = number();
    } else if (qualified == "radio.antenna_gain_tx_dbi") {
      sc.radio.antenna_gain_tx_dbi = number();
    } else if (qualified == "radio.antenna_gain_rx_dbi") {
      sc.radio.antenna_gain_rx_dbi = number();
    } else if (qualified == "radio.channel_width_hz") {
      sc.radio.channel_width_hz = number();
    } else if (qualified == "radio.noise_figure_db") {
      sc.radio.noise_figure_db = number();
    } else if (qualified == "radio.phy_rate_bps") {
      sc.radio.phy_rate_bps = number();
    } else if (qualified == "obstacle_params.wall_loss_db") {
      sc.obstacle_params.wall_loss_db = number();
    } else if (qualified == "obstacle_params.walls_per_building") {
      sc.obstacle_params.walls_per_building = static_cast<int>(integer());
    } else if (qualified == "obstacle_params.shadowing_sigma_los_db") {
      sc.obstacle_params.shadowing_sigma_los_db = number();
    } else if (qualified == "obstacle_params.shadowing_sigma_nlos_db") {
      sc.obstacle_params.shadowing_sigma_nlos_db = number();
    } else if (qualified == "error_params.snr_mid_db") {
      sc.error_params.snr_mid_db = number();
    } else if (qualified == "error_params.steepness_db") {
      sc.error_params.steepness_db = number();
    } else if (qualified == "error_params.max_retries") {
      sc.error_params.max_retries = static_cast<int>(integer());
    } else if (qualified == "error_params.per_attempt_overhead_s") {
      sc.per_attempt_overhead_s = number();
    } else if (qualified == "traffic.mode") {
      if (value == "udp") {
        sc.mode = TrafficMode::kUdp;
      } else if (value == "tcp_lite") {
        sc.mode = TrafficMode::kTcpLite;
      } else {
        parse_fail(name, line,
                   "traffic mode must be 'udp' or 'tcp_lite', got '" +
                       std::string(value) + "'");
      }
    } else if (qualified == "traffic.offered_load_bps") {
      sc.offered_load_bps = number();
    } else if (qualified == "traffic.packet_bytes") {
      sc.packet_bytes = integer();
    } else if (qualified == "traffic.queue_capacity_packets") {
      sc.queue_capacity_packets = integer();
    } else if (qualified == "traffic.tcp_window_packets") {
      sc.tcp_window_packets = static_cast<int>(integer());
    } else if (qualified == "traffic.tcp_rto_multiplier") {
      sc.tcp_rto_multiplier = number();
    } else if (qualified == "traffic.tcp_max_retransmits") {
      sc.tcp_max_retransmits = static_cast<int>(integer());
    } else if (qualified == "timing.warmup_s") {
      sc.warmup_s = number();
    } else if (qualified == "timing.measure_s") {
      sc.measure_s = number();
    } else if (qualified == "seeds.list") {
      for (std::string_view token : detail::split_ws(value))
        detail::parse_seed_token(token, name, line, doc.seeds);
    }
  }

  if (!have_ue)
    parse_fail(name, line, "missing required key 'ue' in section [nodes]");
  if (!have_uav)
    parse_fail(name, line, "missing required key 'uav' in section [nodes]");
  if (!have_frequency)
    parse_fail(name, line,
               "missing required key 'frequency_hz' in section [radio]");

  validate_scenario(sc);
  return doc;
}

inline ScenarioDoc load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open scenario file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.stem().string());
}

}  // namespace agsim
