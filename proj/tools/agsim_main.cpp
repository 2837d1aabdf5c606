// agsim — deterministic air-to-ground link simulator.
//
//   agsim run   <scenario.cfg> [--seed N | --seeds a..b] [--out csv] [--json path]
//   agsim sweep <scenario.cfg> --frequencies 5e9,10e9 [...]
//   agsim place <scenario.cfg> [--region x0,x1,y0,y1,z0,z1] [--grid-step s] [...]
//   agsim hist  <results.csv> [--bins N] [--out csv]

#include <array>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "agsim/cli.hpp"
#include "agsim/errors.hpp"

namespace {

void add_seed_flags(CLI::App* cmd, agsim::cli::SeedSelection& seeds) {
  cmd->add_option("--seed", seeds.single, "Single seed to run");
  cmd->add_option("--seeds", seeds.range,
                  "Seed range a..b (inclusive) or one seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic air-to-ground wireless link simulator"};
  app.require_subcommand(1);

  agsim::cli::RunOptions run_opt;
  std::string run_out, run_json;
  CLI::App* run = app.add_subcommand("run", "Run one scenario over seeds");
  run->add_option("scenario", run_opt.scenario_path, "Scenario file")
      ->required();
  add_seed_flags(run, run_opt.seeds);
  run->add_option("--out", run_out, "Results CSV path (default: stdout)");
  run->add_option("--json", run_json, "Structured JSON report path");

  agsim::cli::SweepOptions sweep_opt;
  std::string sweep_out;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a scenario across frequencies");
  sweep->add_option("scenario", sweep_opt.scenario_path, "Scenario file")
      ->required();
  sweep->add_option("--frequencies", sweep_opt.frequencies,
                    "Comma-separated frequencies in Hz")
      ->required();
  add_seed_flags(sweep, sweep_opt.seeds);
  sweep->add_option("--out", sweep_out, "Results CSV path (default: stdout)");

  agsim::cli::PlaceOptions place_opt;
  std::string place_out, region_spec;
  CLI::App* place = app.add_subcommand(
      "place", "Search a UAV position restoring line of sight");
  place->add_option("scenario", place_opt.scenario_path, "Scenario file")
      ->required();
  place->add_option("--region", region_spec,
                    "Search bounds x0,x1,y0,y1,z0,z1 (default "
                    "-50,50,-50,50,10,10)");
  place->add_option("--grid-step", place_opt.grid_step, "Grid step in meters")
      ->capture_default_str();
  place->add_option("--alt-min", place_opt.altitude_min,
                    "Minimum UAV altitude (default: region z range)");
  place->add_option("--alt-max", place_opt.altitude_max,
                    "Maximum UAV altitude (default: region z range)");
  add_seed_flags(place, place_opt.seeds);
  place->add_option("--out", place_out,
                    "Before/after results CSV path (default: stdout)");

  agsim::cli::HistOptions hist_opt;
  std::string hist_out;
  CLI::App* hist =
      app.add_subcommand("hist", "Bin per-run throughput from a results CSV");
  hist->add_option("results", hist_opt.results_csv, "Results CSV file")
      ->required();
  hist->add_option("--bins", hist_opt.bins, "Number of bins")
      ->capture_default_str();
  hist->add_option("--out", hist_out, "Histogram CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  auto path_or_none =
      [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (run->parsed()) {
    run_opt.out_csv = path_or_none(run_out);
    run_opt.out_json = path_or_none(run_json);
    return agsim::cli::cmd_run(run_opt, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    sweep_opt.out_csv = path_or_none(sweep_out);
    return agsim::cli::cmd_sweep(sweep_opt, std::cout, std::cerr);
  }
  if (place->parsed()) {
    if (!region_spec.empty()) {
      const auto values =
          agsim::cli::detail::parse_double_list(region_spec, "--region");
      if (values.size() != 6) {
        std::cerr << "error: --region needs 6 values: x0,x1,y0,y1,z0,z1\n";
        return agsim::cli::kExitConfig;
      }
      std::array<double, 6> region{};
      std::copy(values.begin(), values.end(), region.begin());
      place_opt.region = region;
    }
    place_opt.out_csv = path_or_none(place_out);
    return agsim::cli::cmd_place(place_opt, std::cout, std::cerr);
  }
  hist_opt.out_csv = path_or_none(hist_out);
  return agsim::cli::cmd_hist(hist_opt, std::cout, std::cerr);
}
