#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agsim/errors.hpp"
#include "agsim/simcore.hpp"

namespace agsim {

// Shortest representation that parses back to the identical double.
inline std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

inline constexpr std::string_view kResultsCsvHeader =
    "scenario,seed,frequency_hz,throughput_bps,pdr,loss_ratio,mean_delay_s,"
    "delivered,generated";

// One results row. Aggregate rows carry seed == "AGG" with mean metric
// values and summed counts.
struct ResultRow {
  std::string scenario;
  std::string seed;
  double frequency_hz = 0.0;
  double throughput_bps = 0.0;
  double pdr = 0.0;
  double loss_ratio = 0.0;
  double mean_delay_s = 0.0;
  long delivered = 0;
  long generated = 0;

  bool is_aggregate() const { return seed == "AGG"; }
};

inline ResultRow make_run_row(std::string_view scenario, std::uint64_t seed,
                              double frequency_hz, const MetricsReport& r) {
  return ResultRow{std::string(scenario), std::to_string(seed), frequency_hz,
                   r.throughput_bps,      r.pdr,                r.loss_ratio,
                   r.mean_delay_s,        r.delivered_count,    r.generated_count};
}

inline ResultRow make_aggregate_row(std::string_view scenario,
                                    double frequency_hz, const Aggregate& a) {
  return ResultRow{std::string(scenario), "AGG",           frequency_hz,
                   a.throughput_bps_mean, a.pdr_mean,      a.loss_ratio_mean,
                   a.mean_delay_s_mean,   a.delivered_sum, a.generated_sum};
}

inline void write_results_csv(std::ostream& out,
                              std::span<const ResultRow> rows) {
  out << kResultsCsvHeader << "\n";
  for (const ResultRow& row : rows) {
    out << row.scenario << ',' << row.seed << ','
        << format_double(row.frequency_hz) << ','
        << format_double(row.throughput_bps) << ',' << format_double(row.pdr)
        << ',' << format_double(row.loss_ratio) << ','
        << format_double(row.mean_delay_s) << ',' << row.delivered << ','
        << row.generated << "\n";
  }
}

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return fields;
  };

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw ParseError("results csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsCsvHeader)
    throw ParseError("results csv:1: unexpected header '" + line + "'");

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 9)
      throw ParseError("results csv:" + std::to_string(line_no) +
                       ": expected 9 fields, got " +
                       std::to_string(fields.size()));
    auto number = [&](int idx) {
      double v = 0.0;
      const std::string& f = fields[idx];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        throw ParseError("results csv:" + std::to_string(line_no) +
                         ": invalid number '" + f + "'");
      return v;
    };
    auto integer = [&](int idx) {
      long v = 0;
      const std::string& f = fields[idx];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        throw ParseError("results csv:" + std::to_string(line_no) +
                         ": invalid integer '" + f + "'");
      return v;
    };
    ResultRow row;
    row.scenario = fields[0];
    row.seed = fields[1];
    row.frequency_hz = number(2);
    row.throughput_bps = number(3);
    row.pdr = number(4);
    row.loss_ratio = number(5);
    row.mean_delay_s = number(6);
    row.delivered = integer(7);
    row.generated = integer(8);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json histogram_to_json(
    const std::vector<HistogramBin>& bins) {
  nlohmann::json out = nlohmann::json::array();
  for (const HistogramBin& bin : bins) {
    out.push_back({{"lower_bps", bin.lower_bps},
                   {"upper_bps", bin.upper_bps},
                   {"count", bin.count}});
  }
  return out;
}

inline nlohmann::json report_to_json(const MetricsReport& report) {
  return nlohmann::json{{"throughput_bps", report.throughput_bps},
                        {"pdr", report.pdr},
                        {"loss_ratio", report.loss_ratio},
                        {"mean_delay_s", report.mean_delay_s},
                        {"delivered", report.delivered_count},
                        {"generated", report.generated_count},
                        {"dropped", report.dropped_count},
                        {"histogram", histogram_to_json(report.histogram)}};
}

inline nlohmann::json aggregate_to_json(const Aggregate& agg) {
  auto triple = [](double mean, double mn, double mx) {
    return nlohmann::json{{"mean", mean}, {"min", mn}, {"max", mx}};
  };
  return nlohmann::json{
      {"throughput_bps", triple(agg.throughput_bps_mean, agg.throughput_bps_min,
                                agg.throughput_bps_max)},
      {"pdr", triple(agg.pdr_mean, agg.pdr_min, agg.pdr_max)},
      {"loss_ratio",
       triple(agg.loss_ratio_mean, agg.loss_ratio_min, agg.loss_ratio_max)},
      {"mean_delay_s", triple(agg.mean_delay_s_mean, agg.mean_delay_s_min,
                              agg.mean_delay_s_max)},
      {"delivered", agg.delivered_sum},
      {"generated", agg.generated_sum},
      {"dropped", agg.dropped_sum},
      {"histogram", histogram_to_json(agg.histogram)}};
}

inline nlohmann::json batch_to_json(std::string_view scenario,
                                    double frequency_hz,
                                    const BatchResult& batch) {
  nlohmann::json runs = nlohmann::json::array();
  for (const SeededReport& r : batch.runs) {
    nlohmann::json entry = report_to_json(r.report);
    entry["seed"] = r.seed;
    runs.push_back(std::move(entry));
  }
  return nlohmann::json{{"scenario", std::string(scenario)},
                        {"frequency_hz", frequency_hz},
                        {"runs", std::move(runs)},
                        {"aggregate", aggregate_to_json(batch.aggregate)}};
}

}  // namespace agsim
