#include "qhot/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "qhot/errors.hpp"

namespace qhot {

namespace {

// Tracks which keys of one JSON object were consumed so that leftovers can
// be reported by path.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path)
      : obj_(&j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ConfigError(path_ + ": expected an object");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_->contains(key);
  }

  const nlohmann::json& raw(const char* key) { return (*obj_)[key]; }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) {
      throw ConfigError(path_ + "/" + key + ": expected a number");
    }
    return v.get<double>();
  }

  std::int64_t integer(const char* key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) {
      throw ConfigError(path_ + "/" + key + ": expected an integer");
    }
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(path_ + "/" + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::vector<double> number_array(const char* key,
                                   std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array()) {
      throw ConfigError(path_ + "/" + key + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(path_ + "/" + key + "/" + std::to_string(i) +
                          ": expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const std::string& path() const { return path_; }

  void done() {
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (seen_.find(it.key()) == seen_.end()) {
        throw ConfigError(path_ + "/" + it.key() + ": unknown key");
      }
    }
  }

 private:
  const nlohmann::json* obj_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void rethrow_as_config(const std::string& path,
                                    const std::exception& err) {
  throw ConfigError(path + ": " + err.what());
}

}  // namespace

void WignerGridSpec::validate() const {
  if (!(x_max > 0.0) || !(p_max > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("wigner grid: x_max, p_max, step must be > 0");
  }
  if (step > x_max || step > p_max) {
    throw std::invalid_argument("wigner grid: step larger than the range");
  }
}

void RunCounts::validate() const {
  if (samples < 0 || trace_trials < 0 || click_trials < 0 || write_pulses < 0) {
    throw std::invalid_argument("run counts must be >= 0");
  }
  if (g2_tau_max < 0) {
    throw std::invalid_argument("g2_tau_max must be >= 0");
  }
}

void ScanSettings::validate() const {
  if (widths.size() < 3) {
    throw std::invalid_argument("scan needs at least 3 candidate widths");
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] > 0.0)) {
      throw std::invalid_argument("scan widths must be > 0");
    }
  }
}

std::vector<double> DecaySettings::default_delays() {
  std::vector<double> delays(33);
  for (std::size_t i = 0; i < delays.size(); ++i) delays[i] = 50e-9 * i;
  return delays;
}

void DecaySettings::validate() const {
  if (delays.empty()) return;  // decay dataset disabled
  if (delays.size() < 3) {
    throw std::invalid_argument("decay needs at least 3 delays");
  }
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (!(delays[i] > delays[i - 1])) {
      throw std::invalid_argument("decay delays must be strictly increasing");
    }
  }
  if (!(delays.front() >= 0.0)) {
    throw std::invalid_argument("decay delays must be >= 0");
  }
  if (!(eta0 > 0.0) || eta0 > 1.0) {
    throw std::invalid_argument("decay eta0 must be in (0, 1]");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("decay tau must be > 0");
  }
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument("decay noise_sigma must be >= 0");
  }
}

void PhysicsSettings::validate() const {
  if (!(temperature > 0.0) || !(wavelength > 0.0) || !(mass_amu > 0.0) ||
      !(cooperativity > 0.0)) {
    throw std::invalid_argument("physics parameters must be > 0");
  }
}

DiagonalState ExperimentConfig::state() const {
  return DiagonalState(populations);
}

TemporalMode ExperimentConfig::mode() const {
  return gaussian_mode(grid, mode_center, mode_sigma);
}

SourceModel ExperimentConfig::source() const {
  return SourceModel{state(), mode(), herald_rate};
}

ReconstructionSettings ExperimentConfig::recon_settings(bool corrected) const {
  ReconstructionSettings settings;
  settings.cutoff = cutoff;
  settings.eta_assumed = corrected ? chain.eta_det() : 1.0;
  settings.nu_assumed = corrected ? chain.nu : 0.0;
  settings.tol = tol;
  settings.max_iter = max_iter;
  settings.grid = kernel_grid;
  return settings;
}

void ExperimentConfig::validate() const {
  try {
    (void)DiagonalState(populations);
  } catch (const std::exception& err) {
    rethrow_as_config("/source/populations", err);
  }
  try {
    grid.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/grid", err);
  }
  try {
    (void)mode();
  } catch (const std::exception& err) {
    rethrow_as_config("/source", err);
  }
  try {
    chain.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/chain", err);
  }
  if (!(herald_rate > 0.0) || herald_rate > 1.0) {
    throw ConfigError("/source/herald_rate: must be in (0, 1]");
  }
  try {
    recon_settings(true).validate();
    recon_settings(false).validate();
    (void)kernel_grid.size();
  } catch (const std::exception& err) {
    rethrow_as_config("/reconstruction", err);
  }
  if (bootstrap_resamples != 0 && bootstrap_resamples < kMinBootstrapResamples) {
    throw ConfigError("/reconstruction/bootstrap_resamples: must be 0 or >= " +
                      std::to_string(kMinBootstrapResamples));
  }
  try {
    run.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/run", err);
  }
  try {
    wigner.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/run/wigner", err);
  }
  try {
    scan.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/scan", err);
  }
  try {
    decay.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/decay", err);
  }
  try {
    physics.validate();
  } catch (const std::exception& err) {
    rethrow_as_config("/physics", err);
  }
  if (!metadata.is_object()) {
    throw ConfigError("/metadata: expected an object");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["source"] = {{"populations", populations},
                 {"mode_center", mode_center},
                 {"mode_sigma", mode_sigma},
                 {"herald_rate", herald_rate}};
  j["chain"] = {{"eta_hd", chain.eta_hd},
                {"eta_m", chain.eta_m},
                {"eta_q", chain.eta_q},
                {"nu", chain.nu},
                {"eta_c", chain.eta_c}};
  j["grid"] = {{"dt", grid.dt}, {"n_samples", grid.n_samples}};
  j["reconstruction"] = {{"cutoff", cutoff},
                         {"tol", tol},
                         {"max_iter", max_iter},
                         {"x_max", kernel_grid.x_max},
                         {"x_step", kernel_grid.step},
                         {"bootstrap_resamples", bootstrap_resamples}};
  j["run"] = {{"samples", run.samples},
              {"trace_trials", run.trace_trials},
              {"click_trials", run.click_trials},
              {"write_pulses", run.write_pulses},
              {"g2_tau_max", run.g2_tau_max},
              {"wigner",
               {{"x_max", wigner.x_max},
                {"p_max", wigner.p_max},
                {"step", wigner.step}}}};
  j["scan"] = {{"widths", scan.widths}};
  j["decay"] = {{"delays", decay.delays},
                {"eta0", decay.eta0},
                {"tau", decay.tau},
                {"noise_sigma", decay.noise_sigma}};
  j["physics"] = {{"temperature", physics.temperature},
                  {"wavelength", physics.wavelength},
                  {"mass_amu", physics.mass_amu},
                  {"cooperativity", physics.cooperativity}};
  j["metadata"] = metadata;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  Section top(j, "");
  config.seed = top.unsigned_integer("seed", config.seed);

  if (top.has("source")) {
    Section source(top.raw("source"), "/source");
    config.populations = source.number_array("populations", config.populations);
    config.mode_center = source.number("mode_center", config.mode_center);
    config.mode_sigma = source.number("mode_sigma", config.mode_sigma);
    config.herald_rate = source.number("herald_rate", config.herald_rate);
    source.done();
  }
  if (top.has("chain")) {
    Section chain(top.raw("chain"), "/chain");
    config.chain.eta_hd = chain.number("eta_hd", config.chain.eta_hd);
    config.chain.eta_m = chain.number("eta_m", config.chain.eta_m);
    config.chain.eta_q = chain.number("eta_q", config.chain.eta_q);
    config.chain.nu = chain.number("nu", config.chain.nu);
    config.chain.eta_c = chain.number("eta_c", config.chain.eta_c);
    chain.done();
  }
  if (top.has("grid")) {
    Section grid(top.raw("grid"), "/grid");
    config.grid.dt = grid.number("dt", config.grid.dt);
    config.grid.n_samples = static_cast<int>(
        grid.integer("n_samples", config.grid.n_samples));
    grid.done();
  }
  if (top.has("reconstruction")) {
    Section recon(top.raw("reconstruction"), "/reconstruction");
    config.cutoff = static_cast<int>(recon.integer("cutoff", config.cutoff));
    config.tol = recon.number("tol", config.tol);
    config.max_iter =
        static_cast<int>(recon.integer("max_iter", config.max_iter));
    config.kernel_grid.x_max = recon.number("x_max", config.kernel_grid.x_max);
    config.kernel_grid.step = recon.number("x_step", config.kernel_grid.step);
    config.bootstrap_resamples = static_cast<int>(
        recon.integer("bootstrap_resamples", config.bootstrap_resamples));
    recon.done();
  }
  if (top.has("run")) {
    Section run(top.raw("run"), "/run");
    config.run.samples = run.integer("samples", config.run.samples);
    config.run.trace_trials =
        run.integer("trace_trials", config.run.trace_trials);
    config.run.click_trials =
        run.integer("click_trials", config.run.click_trials);
    config.run.write_pulses =
        run.integer("write_pulses", config.run.write_pulses);
    config.run.g2_tau_max =
        static_cast<int>(run.integer("g2_tau_max", config.run.g2_tau_max));
    if (run.has("wigner")) {
      Section wigner(run.raw("wigner"), "/run/wigner");
      config.wigner.x_max = wigner.number("x_max", config.wigner.x_max);
      config.wigner.p_max = wigner.number("p_max", config.wigner.p_max);
      config.wigner.step = wigner.number("step", config.wigner.step);
      wigner.done();
    }
    run.done();
  }
  if (top.has("scan")) {
    Section scan(top.raw("scan"), "/scan");
    config.scan.widths = scan.number_array("widths", config.scan.widths);
    scan.done();
  }
  if (top.has("decay")) {
    Section decay(top.raw("decay"), "/decay");
    config.decay.delays = decay.number_array("delays", config.decay.delays);
    config.decay.eta0 = decay.number("eta0", config.decay.eta0);
    config.decay.tau = decay.number("tau", config.decay.tau);
    config.decay.noise_sigma =
        decay.number("noise_sigma", config.decay.noise_sigma);
    decay.done();
  }
  if (top.has("physics")) {
    Section physics(top.raw("physics"), "/physics");
    config.physics.temperature =
        physics.number("temperature", config.physics.temperature);
    config.physics.wavelength =
        physics.number("wavelength", config.physics.wavelength);
    config.physics.mass_amu =
        physics.number("mass_amu", config.physics.mass_amu);
    config.physics.cooperativity =
        physics.number("cooperativity", config.physics.cooperativity);
    physics.done();
  }
  if (top.has("metadata")) {
    if (!top.raw("metadata").is_object()) {
      throw ConfigError("/metadata: expected an object");
    }
    config.metadata = top.raw("metadata");
  }
  top.done();

  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // map the byte offset to line and column for a usable message
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit =
        err.byte > 0 && err.byte <= text.size() ? err.byte - 1 : text.size();
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + err.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& err) {
    throw ConfigError(path + ": " + err.what());
  }
}

}  // namespace qhot
