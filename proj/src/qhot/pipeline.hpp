#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qhot/config.hpp"

namespace qhot {

// Which reconstruction variants a run emits.
enum class ReconMode { raw, corrected, both };

// Command-line overrides layered on top of a config file. trials replaces
// both the trace and the click trial counts; grid replaces the Wigner grid.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::int64_t> samples;
  std::optional<WignerGridSpec> grid;
};

// Returns the config with overrides applied and revalidated.
ExperimentConfig apply_overrides(ExperimentConfig config,
                                 const RunOverrides& overrides);

// Synthesizes every dataset the config asks for into out_dir
// (quadratures.csv, traces.csv, clicks.csv, decay.csv) and writes
// manifest.json last. write_pulses > 0 draws the shared heralded trial count
// first. Deterministic per seed for any worker count.
void run_simulate(const ExperimentConfig& config, const std::string& out_dir);

// Reads quadratures.csv from data_dir and writes the selected reconstruction
// variants into out_dir: Wigner and marginal tables per variant plus
// reconstruction.json (populations, bootstrap errors, likelihood, W(0,0)).
void run_reconstruct(const ExperimentConfig& config,
                     const std::string& data_dir, const std::string& out_dir,
                     ReconMode mode);

// Counting and calibration analyses over the datasets in data_dir: g2 table,
// arrival histograms, filter-width scan with the vacuum-reference check, and
// the storage-decay fit. Skips analyses whose dataset the config disables;
// a dataset the config asks for but is missing raises an error naming the
// file. Writes analysis_summary.json last.
void run_analyze(const ExperimentConfig& config, const std::string& data_dir,
                 const std::string& out_dir);

// Derived quantities of the configured setup, no datasets required:
// cooperativity bound, Doppler time, efficiency budget, source-state g2 and
// Wigner origin. Writes report.txt and report.json.
void run_report(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace qhot
