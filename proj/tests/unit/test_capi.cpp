#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qhot.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string temp_dir(const char* name) {
  const auto dir = std::filesystem::path("capi_tmp") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

int data_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int count = -1;  // skip the header
  while (std::getline(in, line)) {
    if (!line.empty()) ++count;
  }
  return count;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("version and error buffer") {
  CHECK(std::strcmp(qhot_version(), "0.1.0") == 0);

  double out = 0.0;
  CHECK(qhot_eta_max(-1.0, &out) == QHOT_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(qhot_last_error()) > 0);
  CHECK(qhot_eta_max(15.0, &out) == QHOT_OK);
  CHECK(out == 0.9375);
  CHECK(std::strlen(qhot_last_error()) == 0);
}

TEST_CASE("state lifecycle through the C surface") {
  const double populations[] = {1.0, 1.0};
  qhot_state* state = nullptr;
  REQUIRE(qhot_state_create(populations, 2, &state) == QHOT_OK);
  REQUIRE(state != nullptr);

  size_t count = 0;
  CHECK(qhot_state_populations(state, nullptr, 0, &count) == QHOT_OK);
  CHECK(count == 2);

  double buffer[2] = {0.0, 0.0};
  REQUIRE(qhot_state_populations(state, buffer, 2, &count) == QHOT_OK);
  CHECK(buffer[0] == 0.5);
  CHECK(buffer[1] == 0.5);

  double small[1];
  CHECK(qhot_state_populations(state, small, 1, &count) ==
        QHOT_ERR_INVALID_ARGUMENT);

  double value = 0.0;
  CHECK(qhot_state_mean_photon(state, &value) == QHOT_OK);
  CHECK(value == 0.5);

  qhot_state_free(state);
}

TEST_CASE("state creation rejects bad populations") {
  const double negative[] = {0.5, -0.5};
  qhot_state* state = nullptr;
  CHECK(qhot_state_create(negative, 2, &state) == QHOT_ERR_INVALID_ARGUMENT);
  CHECK(qhot_state_create(nullptr, 2, &state) == QHOT_ERR_INVALID_ARGUMENT);
  CHECK(qhot_state_create(negative, 2, nullptr) == QHOT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("loss, g2, wigner and pdf") {
  const double single[] = {0.0, 1.0};
  qhot_state* fock1 = nullptr;
  REQUIRE(qhot_state_create(single, 2, &fock1) == QHOT_OK);

  qhot_state* lossy = nullptr;
  REQUIRE(qhot_state_apply_loss(fock1, 0.6, &lossy) == QHOT_OK);
  double buffer[2];
  size_t count = 0;
  REQUIRE(qhot_state_populations(lossy, buffer, 2, &count) == QHOT_OK);
  CHECK(buffer[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(buffer[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(qhot_state_apply_loss(fock1, 1.5, &lossy) ==
        QHOT_ERR_INVALID_ARGUMENT);

  double value = 0.0;
  CHECK(qhot_state_g2(fock1, &value) == QHOT_OK);
  CHECK(value == 0.0);

  CHECK(qhot_state_wigner(fock1, 0.0, 0.0, &value) == QHOT_OK);
  CHECK(value == doctest::Approx(-1.0 / kPi).epsilon(1e-12));

  CHECK(qhot_state_quadrature_pdf(fock1, 0.0, &value) == QHOT_OK);
  CHECK(value == 0.0);

  const double vac[] = {1.0, 0.0};
  qhot_state* vacuum = nullptr;
  REQUIRE(qhot_state_create(vac, 2, &vacuum) == QHOT_OK);
  CHECK(qhot_state_g2(vacuum, &value) == QHOT_ERR_NUMERIC);
  CHECK(qhot_state_wigner(vacuum, 0.0, 0.0, &value) == QHOT_OK);
  CHECK(value == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(qhot_state_quadrature_pdf(vacuum, 0.0, &value) == QHOT_OK);
  CHECK(value == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));

  qhot_state_free(vacuum);
  qhot_state_free(lossy);
  qhot_state_free(fock1);
}

TEST_CASE("scalar helpers") {
  double value = 0.0;
  REQUIRE(qhot_fock_wavefunction(0, 0.0, &value) == QHOT_OK);
  CHECK(value == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-12));
  CHECK(qhot_fock_wavefunction(300, 0.0, &value) ==
        QHOT_ERR_INVALID_ARGUMENT);

  REQUIRE(qhot_doppler_time(86.909180, 50e-6, 795e-9, &value) == QHOT_OK);
  CHECK(value == doctest::Approx(915e-9).epsilon(2e-3));
  CHECK(qhot_doppler_time(86.909180, -1.0, 795e-9, &value) ==
        QHOT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pipeline through the C surface") {
  const std::string dir = temp_dir("pipeline");
  const std::string config = join(dir, "config.json");
  write_text(config, R"({
  "run": {"samples": 3000, "trace_trials": 0, "click_trials": 0},
  "decay": {"delays": []},
  "reconstruction": {"bootstrap_resamples": 0, "max_iter": 300}
})");

  const std::string data = join(dir, "data");
  qhot_run_options options{};
  options.has_seed = 1;
  options.seed = 41;
  REQUIRE(qhot_run_simulate(config.c_str(), data.c_str(), &options) == QHOT_OK);
  CHECK(data_lines(join(data, "quadratures.csv")) == 3000);
  CHECK_FALSE(std::filesystem::exists(join(data, "traces.csv")));
  CHECK_FALSE(std::filesystem::exists(join(data, "decay.csv")));
  const nlohmann::json manifest = load_json(join(data, "manifest.json"));
  CHECK(manifest["seed"] == 41);
  CHECK(manifest["config"]["run"]["samples"] == 3000);

  options.has_samples = 1;
  options.samples = 500;
  const std::string data_small = join(dir, "data_small");
  REQUIRE(qhot_run_simulate(config.c_str(), data_small.c_str(), &options) ==
          QHOT_OK);
  CHECK(data_lines(join(data_small, "quadratures.csv")) == 500);

  const std::string recon = join(dir, "recon");
  REQUIRE(qhot_run_reconstruct(config.c_str(), data.c_str(), recon.c_str(),
                               QHOT_RECON_RAW, &options) == QHOT_OK);
  CHECK(std::filesystem::exists(join(recon, "wigner_raw.csv")));
  CHECK(std::filesystem::exists(join(recon, "marginal_raw.csv")));
  CHECK_FALSE(std::filesystem::exists(join(recon, "wigner_corrected.csv")));
  const nlohmann::json result = load_json(join(recon, "reconstruction.json"));
  CHECK(result["reconstructions"].contains("raw"));
  CHECK_FALSE(result["reconstructions"].contains("corrected"));
  CHECK(result["samples_used"] == 3000);

  const std::string report = join(dir, "report");
  REQUIRE(qhot_run_report(config.c_str(), report.c_str(), nullptr) == QHOT_OK);
  CHECK(load_json(join(report, "report.json"))["eta_max"] == 0.9375);

  CHECK(qhot_run_reconstruct(config.c_str(), data.c_str(), recon.c_str(),
                             static_cast<qhot_recon_mode>(42), &options) ==
        QHOT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pipeline error mapping") {
  const std::string dir = temp_dir("errors");
  const std::string out = join(dir, "out");

  CHECK(qhot_run_simulate(nullptr, out.c_str(), nullptr) ==
        QHOT_ERR_INVALID_ARGUMENT);
  CHECK(qhot_run_simulate("does_not_exist.json", out.c_str(), nullptr) ==
        QHOT_ERR_IO);

  const std::string bad_schema = join(dir, "bad_schema.json");
  write_text(bad_schema, R"({"chain": {"eta": 1}})");
  CHECK(qhot_run_simulate(bad_schema.c_str(), out.c_str(), nullptr) ==
        QHOT_ERR_CONFIG);
  CHECK(std::string(qhot_last_error()).find("/chain/eta") !=
        std::string::npos);

  const std::string bad_syntax = join(dir, "bad_syntax.json");
  write_text(bad_syntax, "{ nope\n");
  CHECK(qhot_run_simulate(bad_syntax.c_str(), out.c_str(), nullptr) ==
        QHOT_ERR_CONFIG);

  const std::string config = join(dir, "config.json");
  write_text(config, R"({"run": {"samples": 200}})");
  CHECK(qhot_run_analyze(config.c_str(), join(dir, "nowhere").c_str(),
                         out.c_str(), nullptr) == QHOT_ERR_IO);
}
