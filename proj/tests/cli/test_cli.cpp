#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qhot/dataset.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* cli_path() { return QHOT_CLI_PATH; }

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::path("cli_tmp") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

// Runs a full shell command and returns its exit code; stderr is captured
// into err_path.
int run_cmd(const std::string& cmd, const std::filesystem::path& err_path) {
  const int status =
      std::system((cmd + " 2>" + err_path.string()).c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli(const std::string& args, const std::filesystem::path& err_path) {
  return run_cmd(std::string(cli_path()) + " " + args, err_path);
}

int run_cli(const std::string& args) {
  return run_cli(args, "cli_tmp/stderr.log");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  return nlohmann::json::parse(slurp(path));
}

bool same_bytes(const std::filesystem::path& a,
                const std::filesystem::path& b) {
  return slurp(a) == slurp(b);
}

int csv_rows(const std::filesystem::path& path) {
  const qhot::CsvTable table = qhot::read_csv(path.string());
  return static_cast<int>(table.rows.size());
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  const auto dir = temp_dir("usage");
  const auto err = dir / "err.txt";
  CHECK(run_cli("frobnicate", err) == 1);
  CHECK(run_cli("simulate", err) == 1);  // missing required flags
  CHECK(run_cli("", err) == 1);

  write_text(dir / "cfg.json", "{}");
  const std::string base = "reconstruct --config " + (dir / "cfg.json").string() +
                           " --out " + (dir / "out").string();
  CHECK(run_cli(base + " --raw --correct", err) == 1);
  CHECK(run_cli(base + " --grid 3,0.1", err) == 1);
  CHECK(slurp(err).find("x_max,p_max,step") != std::string::npos);
}

TEST_CASE("help and version exit cleanly") {
  const auto dir = temp_dir("help");
  CHECK(run_cli("--help", dir / "err.txt") == 0);
  CHECK(run_cli("--version", dir / "err.txt") == 0);
}

TEST_CASE("config errors exit with 1 and name the problem") {
  const auto dir = temp_dir("cfg_errors");
  const auto err = dir / "err.txt";

  write_text(dir / "syntax.json", "{\n  \"seed\": 1,\n  nope\n}\n");
  CHECK(run_cli("simulate --config " + (dir / "syntax.json").string() +
                    " --out " + (dir / "out").string(),
                err) == 1);
  CHECK(slurp(err).find(":3:") != std::string::npos);

  write_text(dir / "schema.json", R"({"chain": {"eta": 1}})");
  CHECK(run_cli("simulate --config " + (dir / "schema.json").string() +
                    " --out " + (dir / "out").string(),
                err) == 1);
  CHECK(slurp(err).find("/chain/eta") != std::string::npos);

  CHECK(run_cli("simulate --config " + (dir / "missing.json").string() +
                    " --out " + (dir / "out").string(),
                err) == 2);
}

TEST_CASE("simulate is deterministic and rerun-stable") {
  const auto dir = temp_dir("determinism");
  write_text(dir / "cfg.json", R"({
  "run": {"samples": 1500, "trace_trials": 60, "click_trials": 2000,
          "g2_tau_max": 2},
  "reconstruction": {"bootstrap_resamples": 0, "max_iter": 400}
})");
  const std::string cfg = (dir / "cfg.json").string();

  REQUIRE(run_cli("simulate --config " + cfg + " --out " +
                  (dir / "a").string()) == 0);
  REQUIRE(run_cli("simulate --config " + cfg + " --out " +
                  (dir / "b").string()) == 0);
  for (const char* name :
       {"quadratures.csv", "traces.csv", "clicks.csv", "decay.csv",
        "manifest.json"}) {
    CHECK_MESSAGE(same_bytes(dir / "a" / name, dir / "b" / name), name);
  }

  // a different seed must change the data
  REQUIRE(run_cli("simulate --config " + cfg + " --seed 999 --out " +
                  (dir / "c").string()) == 0);
  CHECK_FALSE(same_bytes(dir / "a" / "quadratures.csv",
                         dir / "c" / "quadratures.csv"));

  // downstream outputs are identical for any worker count
  REQUIRE(run_cmd("env QHOT_WORKERS=1 " + std::string(cli_path()) +
                      " reconstruct --config " + cfg + " --out " +
                      (dir / "a").string(),
                  dir / "err.txt") == 0);
  REQUIRE(run_cmd("env QHOT_WORKERS=3 " + std::string(cli_path()) +
                      " reconstruct --config " + cfg + " --out " +
                      (dir / "b").string(),
                  dir / "err.txt") == 0);
  REQUIRE(run_cmd("env QHOT_WORKERS=1 " + std::string(cli_path()) +
                      " analyze --config " + cfg + " --out " +
                      (dir / "a").string(),
                  dir / "err.txt") == 0);
  REQUIRE(run_cmd("env QHOT_WORKERS=3 " + std::string(cli_path()) +
                      " analyze --config " + cfg + " --out " +
                      (dir / "b").string(),
                  dir / "err.txt") == 0);
  for (const char* name :
       {"reconstruction.json", "wigner_raw.csv", "wigner_corrected.csv",
        "marginal_raw.csv", "marginal_corrected.csv", "g2.csv", "arrivals.csv",
        "filter_scan.csv", "analysis_summary.json"}) {
    CHECK_MESSAGE(same_bytes(dir / "a" / name, dir / "b" / name), name);
  }
}

TEST_CASE("heralded mode draws a binomial trial count") {
  const auto dir = temp_dir("herald");
  write_text(dir / "cfg.json", R"({
  "source": {"herald_rate": 0.001},
  "run": {"samples": 0, "trace_trials": 77, "click_trials": 77,
          "write_pulses": 1000000},
  "decay": {"delays": []}
})");
  REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() +
                  " --out " + (dir / "out").string()) == 0);

  const nlohmann::json manifest = load_json(dir / "out" / "manifest.json");
  const std::int64_t heralded = manifest["heralded_trials"].get<std::int64_t>();
  CHECK(heralded >= 900);
  CHECK(heralded <= 1100);
  CHECK(csv_rows(dir / "out" / "traces.csv") == static_cast<int>(heralded));
  CHECK(csv_rows(dir / "out" / "clicks.csv") == static_cast<int>(heralded));
  CHECK_FALSE(std::filesystem::exists(dir / "out" / "quadratures.csv"));
}

TEST_CASE("vacuum dataset reconstructs to vacuum") {
  const auto dir = temp_dir("vacuum");
  write_text(dir / "cfg.json", R"({
  "source": {"populations": [1.0, 0.0]},
  "chain": {"eta_hd": 1.0, "eta_m": 1.0, "eta_q": 1.0, "nu": 0.0},
  "run": {"samples": 20000, "trace_trials": 0, "click_trials": 0},
  "decay": {"delays": []},
  "reconstruction": {"bootstrap_resamples": 0}
})");
  const std::string cfg = (dir / "cfg.json").string();
  REQUIRE(run_cli("simulate --config " + cfg + " --out " +
                  (dir / "out").string()) == 0);
  REQUIRE(run_cli("reconstruct --config " + cfg + " --out " +
                  (dir / "out").string()) == 0);

  const nlohmann::json result =
      load_json(dir / "out" / "reconstruction.json");
  for (const char* variant : {"raw", "corrected"}) {
    const auto& entry = result["reconstructions"][variant];
    CHECK(entry["populations"][0].get<double>() >= 0.99);
    CHECK(std::abs(entry["w_origin"].get<double>() - 1.0 / kPi) <= 0.01);
  }
}

TEST_CASE("corrupted dataset leaves no partial reconstruction") {
  const auto dir = temp_dir("corrupt");
  write_text(dir / "cfg.json",
             R"({"reconstruction": {"bootstrap_resamples": 0}})");
  std::filesystem::create_directories(dir / "data");
  write_text(dir / "data" / "quadratures.csv",
             "sample_id,x\n0,0.5\n1,garbage\n");

  const auto err = dir / "err.txt";
  CHECK(run_cli("reconstruct --config " + (dir / "cfg.json").string() +
                    " --data " + (dir / "data").string() + " --out " +
                    (dir / "out").string(),
                err) == 2);
  CHECK(slurp(err).find("quadratures.csv") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "out" / "reconstruction.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "out" / "wigner_raw.csv"));
}

TEST_CASE("analyze names a missing dataset file") {
  const auto dir = temp_dir("missing_data");
  write_text(dir / "cfg.json", R"({"run": {"samples": 0, "trace_trials": 0,
                                           "click_trials": 500}})");
  std::filesystem::create_directories(dir / "data");
  const auto err = dir / "err.txt";
  CHECK(run_cli("analyze --config " + (dir / "cfg.json").string() +
                    " --data " + (dir / "data").string() + " --out " +
                    (dir / "out").string(),
                err) == 2);
  CHECK(slurp(err).find("clicks.csv") != std::string::npos);
}

TEST_CASE("report writes both formats") {
  const auto dir = temp_dir("report");
  write_text(dir / "cfg.json", "{}");
  REQUIRE(run_cli("report --config " + (dir / "cfg.json").string() +
                  " --out " + (dir / "out").string()) == 0);
  const nlohmann::json report = load_json(dir / "out" / "report.json");
  CHECK(report["eta_max"] == 0.9375);
  CHECK(report["cooperativity"] == 15.0);
  const std::string text = slurp(dir / "out" / "report.txt");
  CHECK(text.find("eta_max") != std::string::npos);
  CHECK(text.find("0.9375") != std::string::npos);
}

TEST_CASE("wigner grid override changes the sampled grid") {
  const auto dir = temp_dir("grid");
  write_text(dir / "cfg.json", R"({
  "run": {"samples": 500, "trace_trials": 0, "click_trials": 0},
  "decay": {"delays": []},
  "reconstruction": {"bootstrap_resamples": 0, "max_iter": 100}
})");
  const std::string cfg = (dir / "cfg.json").string();
  REQUIRE(run_cli("simulate --config " + cfg + " --out " +
                  (dir / "out").string()) == 0);
  REQUIRE(run_cli("reconstruct --config " + cfg + " --raw --grid 1,1,0.5 "
                  "--out " + (dir / "out").string()) == 0);
  // axis -1,-0.5,0,0.5,1 in both directions
  CHECK(csv_rows(dir / "out" / "wigner_raw.csv") == 25);
  CHECK(csv_rows(dir / "out" / "marginal_raw.csv") == 5);
}
