#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qhot/fock.hpp"
#include "qhot/sampler.hpp"
#include "qhot/temporal.hpp"
#include "qhot/tomography.hpp"

namespace qhot {

// Phase-space grid for Wigner tabulation in result files.
struct WignerGridSpec {
  double x_max = 3.0;
  double p_max = 3.0;
  double step = 0.1;

  void validate() const;
};

// Dataset sizes for a simulation run. write_pulses > 0 switches the trial
// counts to heralded mode: the number of trials is drawn once per run as
// Binomial(write_pulses, herald_rate) and used for traces and clicks alike.
struct RunCounts {
  std::int64_t samples = 103000;
  std::int64_t trace_trials = 2000;
  std::int64_t click_trials = 200000;
  std::int64_t write_pulses = 0;
  int g2_tau_max = 5;

  void validate() const;
};

struct ScanSettings {
  std::vector<double> widths = {40e-9, 48e-9, 56e-9, 64e-9, 72e-9};

  void validate() const;
};

// Synthetic efficiency-versus-storage-delay dataset parameters.
struct DecaySettings {
  std::vector<double> delays = default_delays();
  double eta0 = 0.37;
  double tau = 915e-9;
  double noise_sigma = 0.02;

  // 0 to 1.6 us in 50 ns steps; dense enough for a few-percent tau fit at
  // the default noise level.
  static std::vector<double> default_delays();

  void validate() const;
};

struct PhysicsSettings {
  double temperature = 50e-6;   // K
  double wavelength = 795e-9;   // m
  double mass_amu = 86.909180;
  double cooperativity = 15.0;

  void validate() const;
};

// Full description of one reproducible experiment. The defaults describe the
// reference setup: a predominantly single-photon source read out through the
// calibrated homodyne chain, 4 ns sampling over 2.2 us, and a 10-level
// reconstruction. metadata is carried through to manifests untouched and is
// never consumed by computations.
struct ExperimentConfig {
  std::uint64_t seed = 20260823;

  std::vector<double> populations = {0.1652, 0.82, 0.0148};
  double mode_center = 1.0e-6;
  double mode_sigma = 5.65685424949238e-8;  // 40 ns intensity 1/e half-width
  double herald_rate = 1e-3;

  DetectionChain chain{0.82, 0.965, 0.91, 0.01, 0.37};
  TimeGrid grid{};

  int cutoff = 10;
  double tol = 1e-10;
  int max_iter = 5000;
  KernelGrid kernel_grid{};
  int bootstrap_resamples = 20;

  RunCounts run;
  WignerGridSpec wigner;
  ScanSettings scan;
  DecaySettings decay;
  PhysicsSettings physics;
  nlohmann::json metadata = nlohmann::json::object();

  DiagonalState state() const;
  TemporalMode mode() const;
  SourceModel source() const;
  // raw = identity kernel; corrected folds the chain's loss and noise in
  ReconstructionSettings recon_settings(bool corrected) const;

  void validate() const;
  nlohmann::json to_json() const;
};

// Strict-schema assembly. Unknown keys anywhere outside metadata are
// rejected; every error names the offending JSON path.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Reads and parses a config file. Syntax errors are reported with line and
// column; schema and range errors with the JSON path.
ExperimentConfig load_config(const std::string& path);

}  // namespace qhot
