#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agsim/errors.hpp"
#include "agsim/placement.hpp"
#include "agsim/report_io.hpp"
#include "agsim/scenario_io.hpp"
#include "agsim/simcore.hpp"

namespace agsim::cli {

// Exit code classes. Command-line syntax errors are reported by the flag
// parser with its own codes; these cover the tool's failure paths.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;    // malformed scenario / results file
inline constexpr int kExitConfig = 3;   // values that violate an invariant
inline constexpr int kExitRuntime = 4;  // I/O or unexpected failure

struct SeedSelection {
  std::optional<std::uint64_t> single;        // --seed N
  std::optional<std::string> range;           // --seeds a..b
};

namespace detail {

inline std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + ": invalid integer '" +
                      std::string(s) + "'");
  return v;
}

inline std::vector<std::uint64_t> parse_seed_range(std::string_view spec) {
  const auto dots = spec.find("..");
  if (dots == std::string_view::npos)
    return {parse_u64(spec, "--seeds")};
  const std::uint64_t lo = parse_u64(spec.substr(0, dots), "--seeds");
  const std::uint64_t hi = parse_u64(spec.substr(dots + 2), "--seeds");
  if (hi < lo) throw ConfigError("--seeds: range '" + std::string(spec) +
                                 "' is empty");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

inline std::vector<double> parse_double_list(std::string_view spec,
                                             const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    if (comma == std::string_view::npos) comma = spec.size();
    const std::string_view token = spec.substr(start, comma - start);
    if (!token.empty()) {
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ConfigError(std::string(what) + ": invalid number '" +
                          std::string(token) + "'");
      values.push_back(v);
    }
    start = comma + 1;
  }
  return values;
}

inline std::vector<std::uint64_t> resolve_seeds(const ScenarioDoc& doc,
                                                const SeedSelection& sel) {
  if (sel.single) return {*sel.single};
  if (sel.range) return parse_seed_range(*sel.range);
  if (!doc.seeds.empty()) return doc.seeds;
  throw ConfigError("no seeds: pass --seed/--seeds or add a [seeds] section");
}

// Routes a command body's exceptions to the documented exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void emit_csv(const std::vector<ResultRow>& rows,
                     const std::optional<std::filesystem::path>& out_path,
                     std::ostream& fallback) {
  std::ostringstream text;
  write_results_csv(text, rows);
  if (out_path) {
    write_text_file(*out_path, text.str());
  } else {
    fallback << text.str();
  }
}

}  // namespace detail

struct RunOptions {
  std::filesystem::path scenario_path;
  SeedSelection seeds;
  std::optional<std::filesystem::path> out_csv;
  std::optional<std::filesystem::path> out_json;
};

inline int cmd_run(const RunOptions& opt, std::ostream& out,
                   std::ostream& err) {
  return detail::guarded(err, [&] {
    const ScenarioDoc doc = load_scenario_file(opt.scenario_path);
    const auto seeds = detail::resolve_seeds(doc, opt.seeds);
    const BatchResult batch = run_batch(doc.scenario, seeds);

    std::vector<ResultRow> rows;
    for (const SeededReport& r : batch.runs)
      rows.push_back(make_run_row(doc.name, r.seed,
                                  doc.scenario.radio.frequency_hz, r.report));
    rows.push_back(make_aggregate_row(doc.name, doc.scenario.radio.frequency_hz,
                                      batch.aggregate));
    detail::emit_csv(rows, opt.out_csv, out);
    if (opt.out_json) {
      detail::write_text_file(
          *opt.out_json,
          batch_to_json(doc.name, doc.scenario.radio.frequency_hz, batch)
                  .dump(2) +
              "\n");
    }
  });
}

struct SweepOptions {
  std::filesystem::path scenario_path;
  std::string frequencies;  // comma-separated Hz values
  SeedSelection seeds;
  std::optional<std::filesystem::path> out_csv;
};

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return detail::guarded(err, [&] {
    const ScenarioDoc doc = load_scenario_file(opt.scenario_path);
    auto frequencies =
        detail::parse_double_list(opt.frequencies, "--frequencies");
    if (frequencies.empty())
      throw ConfigError("--frequencies: list is empty");
    for (double f : frequencies)
      if (!(f > 0)) throw ConfigError("--frequencies: values must be > 0");
    std::sort(frequencies.begin(), frequencies.end());
    const auto seeds = detail::resolve_seeds(doc, opt.seeds);

    std::vector<ResultRow> rows;
    for (double frequency : frequencies) {
      Scenario scenario = doc.scenario;
      scenario.radio.frequency_hz = frequency;
      const BatchResult batch = run_batch(scenario, seeds);
      for (const SeededReport& r : batch.runs)
        rows.push_back(make_run_row(doc.name, r.seed, frequency, r.report));
      rows.push_back(make_aggregate_row(doc.name, frequency, batch.aggregate));
    }
    detail::emit_csv(rows, opt.out_csv, out);
  });
}

struct PlaceOptions {
  std::filesystem::path scenario_path;
  std::optional<std::array<double, 6>> region;  // x0 x1 y0 y1 z0 z1
  double grid_step = 1.0;
  std::optional<double> altitude_min;
  std::optional<double> altitude_max;
  SeedSelection seeds;
  std::optional<std::filesystem::path> out_csv;
};

inline int cmd_place(const PlaceOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return detail::guarded(err, [&] {
    const ScenarioDoc doc = load_scenario_file(opt.scenario_path);
    SearchRegion region;
    if (opt.region) {
      const auto& r = *opt.region;
      region.bounds = Box{{r[0], r[2], r[4]}, {r[1], r[3], r[5]}};
    }
    region.grid_step = opt.grid_step;
    region.altitude_min = opt.altitude_min.value_or(region.bounds.min.z);
    region.altitude_max = opt.altitude_max.value_or(region.bounds.max.z);

    const auto seeds = detail::resolve_seeds(doc, opt.seeds);
    const RepositionResult result =
        reposition_experiment(doc.scenario, region, seeds);

    err << "position: (" << format_double(result.placement.position.x) << ", "
        << format_double(result.placement.position.y) << ", "
        << format_double(result.placement.position.z) << ")\n"
        << "predicted_path_loss_db: "
        << format_double(result.placement.predicted_path_loss_db) << "\n"
        << "los_clear: " << (result.placement.los_clear ? "true" : "false")
        << "\n"
        << "candidates_evaluated: " << result.placement.candidates_evaluated
        << "\n";
    if (result.was_clear_before)
      err << "note: line of sight was already clear at the original "
             "position\n";

    std::vector<ResultRow> rows;
    const double frequency = doc.scenario.radio.frequency_hz;
    auto append = [&](const std::string& label, const BatchResult& batch) {
      for (const SeededReport& r : batch.runs)
        rows.push_back(make_run_row(label, r.seed, frequency, r.report));
      rows.push_back(make_aggregate_row(label, frequency, batch.aggregate));
    };
    append(doc.name + ":before", result.before);
    append(doc.name + ":after", result.after);
    detail::emit_csv(rows, opt.out_csv, out);
  });
}

struct HistOptions {
  std::filesystem::path results_csv;
  int bins = 20;
  std::optional<std::filesystem::path> out_csv;
};

// Bins the per-run throughput column of a results CSV over [0, max].
inline int cmd_hist(const HistOptions& opt, std::ostream& out,
                    std::ostream& err) {
  return detail::guarded(err, [&] {
    if (opt.bins < 1) throw ConfigError("--bins must be >= 1");
    std::ifstream in(opt.results_csv);
    if (!in)
      throw ParseError("cannot open results file: " +
                       opt.results_csv.string());
    const auto rows = read_results_csv(in);

    std::vector<double> samples;
    for (const ResultRow& row : rows)
      if (!row.is_aggregate()) samples.push_back(row.throughput_bps);
    if (samples.empty())
      throw ConfigError("results csv contains no run rows");

    const double top = *std::max_element(samples.begin(), samples.end());
    const double upper = top > 0.0 ? top : 1.0;
    const double width = upper / opt.bins;
    std::vector<long> counts(opt.bins, 0);
    for (double v : samples) {
      long idx = static_cast<long>(v / width);
      idx = std::clamp<long>(idx, 0, opt.bins - 1);
      ++counts[idx];
    }

    std::ostringstream text;
    text << "bin_lower_bps,bin_upper_bps,count\n";
    for (int i = 0; i < opt.bins; ++i) {
      text << format_double(i * width) << ',' << format_double((i + 1) * width)
           << ',' << counts[i] << "\n";
    }
    if (opt.out_csv) {
      detail::write_text_file(*opt.out_csv, text.str());
    } else {
      out << text.str();
    }
  });
}

}  // namespace agsim::cli
