#include <catch2/catch.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "agsim/cli.hpp"
#include "agsim/report_io.hpp"

namespace fs = std::filesystem;
using namespace agsim;

namespace {

const fs::path kScenario1 = fs::path(AGSIM_SCENARIO_DIR) / "scenario1.cfg";
const fs::path kScenario2 = fs::path(AGSIM_SCENARIO_DIR) / "scenario2.cfg";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("agsim_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int n = 0;
    return n++;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

std::vector<ResultRow> rows_from_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return read_results_csv(in);
}

cli::SeedSelection seeds_range(const std::string& spec) {
  cli::SeedSelection sel;
  sel.range = spec;
  return sel;
}

}  // namespace

TEST_CASE("cmd_run writes per-seed rows plus an aggregate") {
  TempDir tmp;
  cli::RunOptions opt;
  opt.scenario_path = kScenario1;
  opt.seeds = seeds_range("1..3");
  opt.out_csv = tmp.file("out.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(opt, out, err) == cli::kExitOk);

  const auto rows = rows_from_file(*opt.out_csv);
  REQUIRE(rows.size() == 4);
  REQUIRE(rows[0].seed == "1");
  REQUIRE(rows[1].seed == "2");
  REQUIRE(rows[2].seed == "3");
  REQUIRE(rows[3].is_aggregate());
  for (const auto& row : rows) {
    REQUIRE(row.scenario == "scenario1");
    REQUIRE(row.frequency_hz == 5e9);
    REQUIRE(row.pdr + row.loss_ratio == 1.0);
  }
}

TEST_CASE("csv numbers round-trip exactly and re-aggregate to the AGG row") {
  TempDir tmp;
  cli::RunOptions opt;
  opt.scenario_path = kScenario2;
  opt.seeds = seeds_range("1..5");
  opt.out_csv = tmp.file("out.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(opt, out, err) == cli::kExitOk);

  const auto rows = rows_from_file(*opt.out_csv);
  REQUIRE(rows.size() == 6);

  double thr = 0.0, pdr = 0.0, loss = 0.0, delay = 0.0;
  long delivered = 0, generated = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    thr += rows[i].throughput_bps;
    pdr += rows[i].pdr;
    loss += rows[i].loss_ratio;
    delay += rows[i].mean_delay_s;
    delivered += rows[i].delivered;
    generated += rows[i].generated;
  }
  const ResultRow& agg = rows.back();
  REQUIRE(agg.throughput_bps == thr / 5.0);
  REQUIRE(agg.pdr == pdr / 5.0);
  REQUIRE(agg.loss_ratio == loss / 5.0);
  REQUIRE(agg.mean_delay_s == delay / 5.0);
  REQUIRE(agg.delivered == delivered);
  REQUIRE(agg.generated == generated);

  // Emitting the parsed rows again reproduces the file byte for byte.
  std::ostringstream rewritten;
  write_results_csv(rewritten, rows);
  std::ifstream in(*opt.out_csv);
  std::stringstream original;
  original << in.rdbuf();
  REQUIRE(rewritten.str() == original.str());
}

TEST_CASE("cmd_run emits the structured JSON report") {
  TempDir tmp;
  cli::RunOptions opt;
  opt.scenario_path = kScenario1;
  opt.seeds = seeds_range("1..2");
  opt.out_csv = tmp.file("out.csv");
  opt.out_json = tmp.file("out.json");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(opt, out, err) == cli::kExitOk);

  std::ifstream in(*opt.out_json);
  const auto doc = nlohmann::json::parse(in);
  REQUIRE(doc["scenario"] == "scenario1");
  REQUIRE(doc["frequency_hz"] == 5e9);
  REQUIRE(doc["runs"].size() == 2);
  REQUIRE(doc["runs"][0]["seed"] == 1);
  REQUIRE(doc["runs"][0]["histogram"].size() == 20);
  REQUIRE(doc["aggregate"]["throughput_bps"].contains("mean"));
}

TEST_CASE("missing and malformed scenario files exit with the parse code") {
  std::ostringstream out, err;
  cli::RunOptions opt;
  opt.scenario_path = "does_not_exist.cfg";
  REQUIRE(cli::cmd_run(opt, out, err) == cli::kExitParse);
  REQUIRE_THAT(err.str(), Catch::Matchers::Contains("cannot open"));

  TempDir tmp;
  std::ofstream bad(tmp.file("bad.cfg"));
  bad << "[nodes]\nue = 0 0 0\nuav = 30 0 10\n";  // no frequency
  bad.close();
  std::ostringstream err2;
  cli::RunOptions opt2;
  opt2.scenario_path = tmp.file("bad.cfg");
  REQUIRE(cli::cmd_run(opt2, out, err2) == cli::kExitParse);
  REQUIRE_THAT(err2.str(), Catch::Matchers::Contains("frequency_hz"));
}

TEST_CASE("a validation failure exits with the config code") {
  TempDir tmp;
  std::ofstream cfg(tmp.file("invalid.cfg"));
  cfg << "[nodes]\nue = 0 0 0\nuav = 30 0 10\n[radio]\nfrequency_hz = 5e9\n"
      << "[timing]\nmeasure_s = -1\n";
  cfg.close();
  std::ostringstream out, err;
  cli::RunOptions opt;
  opt.scenario_path = tmp.file("invalid.cfg");
  REQUIRE(cli::cmd_run(opt, out, err) == cli::kExitConfig);
}

TEST_CASE("cmd_sweep with one frequency matches cmd_run") {
  TempDir tmp;
  std::ostringstream out, err;

  cli::RunOptions run_opt;
  run_opt.scenario_path = kScenario2;
  run_opt.seeds = seeds_range("1..3");
  run_opt.out_csv = tmp.file("run.csv");
  REQUIRE(cli::cmd_run(run_opt, out, err) == cli::kExitOk);

  cli::SweepOptions sweep_opt;
  sweep_opt.scenario_path = kScenario2;
  sweep_opt.frequencies = "5e9";
  sweep_opt.seeds = seeds_range("1..3");
  sweep_opt.out_csv = tmp.file("sweep.csv");
  REQUIRE(cli::cmd_sweep(sweep_opt, out, err) == cli::kExitOk);

  std::ifstream a(tmp.file("run.csv")), b(tmp.file("sweep.csv"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  REQUIRE(sa.str() == sb.str());
}

TEST_CASE("cmd_sweep orders blocks by frequency and shows the 10 GHz drop") {
  TempDir tmp;
  cli::SweepOptions opt;
  opt.scenario_path = kScenario2;
  opt.frequencies = "10e9,5e9";  // deliberately unsorted
  opt.seeds = seeds_range("1..3");
  opt.out_csv = tmp.file("sweep.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(opt, out, err) == cli::kExitOk);

  const auto rows = rows_from_file(*opt.out_csv);
  REQUIRE(rows.size() == 8);  // two blocks of 3 runs + AGG
  REQUIRE(rows[0].frequency_hz == 5e9);
  REQUIRE(rows[3].is_aggregate());
  REQUIRE(rows[4].frequency_hz == 10e9);
  REQUIRE(rows[7].is_aggregate());
  REQUIRE(rows[7].throughput_bps < rows[3].throughput_bps);
}

TEST_CASE("cmd_sweep rejects empty or bad frequency lists") {
  std::ostringstream out, err;
  cli::SweepOptions opt;
  opt.scenario_path = kScenario2;
  opt.frequencies = "";
  opt.seeds = seeds_range("1");
  REQUIRE(cli::cmd_sweep(opt, out, err) == cli::kExitConfig);
  opt.frequencies = "5e9,abc";
  REQUIRE(cli::cmd_sweep(opt, out, err) == cli::kExitConfig);
  opt.frequencies = "-5e9";
  REQUIRE(cli::cmd_sweep(opt, out, err) == cli::kExitConfig);
}

TEST_CASE("cmd_place recovers line of sight on the obstructed profile") {
  TempDir tmp;
  cli::PlaceOptions opt;
  opt.scenario_path = kScenario2;
  opt.seeds = seeds_range("1..3");
  opt.out_csv = tmp.file("place.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_place(opt, out, err) == cli::kExitOk);
  REQUIRE_THAT(err.str(), Catch::Matchers::Contains("los_clear: true"));

  const auto rows = rows_from_file(*opt.out_csv);
  REQUIRE(rows.size() == 8);
  double before = 0.0, after = 0.0;
  for (const auto& row : rows) {
    if (!row.is_aggregate()) continue;
    if (row.scenario == "scenario2:before") before = row.throughput_bps;
    if (row.scenario == "scenario2:after") after = row.throughput_bps;
  }
  REQUIRE(after > before);
}

TEST_CASE("cmd_place notes an already clear path") {
  TempDir tmp;
  cli::PlaceOptions opt;
  opt.scenario_path = kScenario1;
  opt.seeds = seeds_range("1..2");
  opt.out_csv = tmp.file("place.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_place(opt, out, err) == cli::kExitOk);
  REQUIRE_THAT(err.str(), Catch::Matchers::Contains("already clear"));
}

TEST_CASE("cmd_place rejects an unusable region") {
  cli::PlaceOptions opt;
  opt.scenario_path = kScenario2;
  opt.seeds = seeds_range("1");
  opt.region = {5.0, -5.0, -5.0, 5.0, 10.0, 10.0};  // x0 > x1
  std::ostringstream out, err;
  REQUIRE(cli::cmd_place(opt, out, err) == cli::kExitConfig);
}

TEST_CASE("cmd_hist bins the run rows") {
  TempDir tmp;
  cli::RunOptions run_opt;
  run_opt.scenario_path = kScenario2;
  run_opt.seeds = seeds_range("1..10");
  run_opt.out_csv = tmp.file("runs.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(run_opt, out, err) == cli::kExitOk);

  cli::HistOptions hist_opt;
  hist_opt.results_csv = tmp.file("runs.csv");
  hist_opt.bins = 20;
  hist_opt.out_csv = tmp.file("hist.csv");
  REQUIRE(cli::cmd_hist(hist_opt, out, err) == cli::kExitOk);

  std::ifstream in(tmp.file("hist.csv"));
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "bin_lower_bps,bin_upper_bps,count");
  long total = 0;
  int bins = 0;
  while (std::getline(in, line)) {
    const auto last_comma = line.rfind(',');
    total += std::stol(line.substr(last_comma + 1));
    ++bins;
  }
  REQUIRE(bins == 20);
  REQUIRE(total == 10);  // one sample per seed row, AGG excluded
}

TEST_CASE("cmd_hist handles a single sample and rejects zero bins") {
  TempDir tmp;
  {
    std::ofstream csv(tmp.file("one.csv"));
    csv << kResultsCsvHeader << "\n";
    csv << "s,1,5e9,4.2e7,1,0,0.006,100,100\n";
  }
  cli::HistOptions opt;
  opt.results_csv = tmp.file("one.csv");
  opt.out_csv = tmp.file("hist.csv");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_hist(opt, out, err) == cli::kExitOk);
  std::ifstream in(tmp.file("hist.csv"));
  std::string line;
  std::getline(in, line);
  long total = 0;
  long nonzero = 0;
  while (std::getline(in, line)) {
    const long c = std::stol(line.substr(line.rfind(',') + 1));
    total += c;
    nonzero += c > 0 ? 1 : 0;
  }
  REQUIRE(total == 1);
  REQUIRE(nonzero == 1);

  opt.bins = 0;
  REQUIRE(cli::cmd_hist(opt, out, err) == cli::kExitConfig);

  cli::HistOptions missing;
  missing.results_csv = tmp.file("absent.csv");
  REQUIRE(cli::cmd_hist(missing, out, err) == cli::kExitParse);
}

TEST_CASE("the installed binary runs end to end") {
  TempDir tmp;
  const std::string csv = tmp.file("cli.csv").string();
  const std::string cmd = std::string(AGSIM_CLI_BIN) + " run " +
                          kScenario1.string() + " --seeds 1..2 --out " + csv +
                          " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  REQUIRE(rows_from_file(csv).size() == 3);

  const std::string bad = std::string(AGSIM_CLI_BIN) +
                          " run does_not_exist.cfg > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == cli::kExitParse);
}
