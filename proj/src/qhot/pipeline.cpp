#include "qhot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <utility>
#include <vector>

#include "qhot/counting.hpp"
#include "qhot/dataset.hpp"
#include "qhot/errors.hpp"
#include "qhot/physics.hpp"
#include "qhot/rng.hpp"
#include "qhot/tomography.hpp"
#include "qhot/version.hpp"

namespace qhot {

namespace {

constexpr std::uint64_t kSaltHerald = 0x686572616c64ULL;
constexpr std::uint64_t kSaltDecay = 0x6465636179ULL;

// Shift applied to the filter for the vacuum-level calibration.
constexpr double kVacuumShift = 600e-9;

struct TrialCounts {
  std::int64_t traces = 0;
  std::int64_t clicks = 0;
  std::optional<std::int64_t> heralded;
};

// In heralded mode the trial count is one binomial draw shared by the trace
// and click datasets; otherwise the configured counts are used as-is.
TrialCounts effective_trials(const ExperimentConfig& config) {
  TrialCounts out{config.run.trace_trials, config.run.click_trials,
                  std::nullopt};
  if (config.run.write_pulses > 0) {
    Rng rng = Rng::for_stream(config.seed ^ kSaltHerald, 0);
    const std::int64_t heralded =
        rng.binomial(config.run.write_pulses, config.herald_rate);
    out.traces = heralded;
    out.clicks = heralded;
    out.heralded = heralded;
  }
  return out;
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir + ": " + ec.message());
  }
}

nlohmann::json manifest_base(const ExperimentConfig& config,
                             const char* command) {
  return nlohmann::json{{"tool", kToolName},
                        {"version", kVersion},
                        {"command", command},
                        {"seed", config.seed},
                        {"config", config.to_json()}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

std::vector<double> grid_axis(double max_value, double step) {
  const int n = static_cast<int>(std::floor(2.0 * max_value / step + 1e-9)) + 1;
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -max_value + i * step;
  return axis;
}

DecayCurve synth_decay(const ExperimentConfig& config) {
  Rng rng = Rng::for_stream(config.seed ^ kSaltDecay, 0);
  DecayCurve curve;
  curve.delays = config.decay.delays;
  curve.efficiencies.reserve(curve.delays.size());
  for (double t : curve.delays) {
    const double ratio = t / config.decay.tau;
    double eta = config.decay.eta0 * std::exp(-ratio * ratio);
    eta += config.decay.noise_sigma * rng.normal();
    curve.efficiencies.push_back(std::clamp(eta, 1e-4, 1.0));
  }
  return curve;
}

std::int64_t hist_count(const ArrivalHistogram& hist, std::int32_t bin) {
  const std::int64_t offset = static_cast<std::int64_t>(bin) - hist.first_bin;
  if (offset < 0 || offset >= static_cast<std::int64_t>(hist.counts.size())) {
    return 0;
  }
  return hist.counts[offset];
}

double sample_variance(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig config,
                                 const RunOverrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.trials) {
    config.run.trace_trials = *overrides.trials;
    config.run.click_trials = *overrides.trials;
  }
  if (overrides.samples) config.run.samples = *overrides.samples;
  if (overrides.grid) config.wigner = *overrides.grid;
  config.validate();
  return config;
}

void run_simulate(const ExperimentConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const TrialCounts trials = effective_trials(config);
  nlohmann::json outputs = nlohmann::json::object();

  if (config.run.samples > 0) {
    const std::vector<double> x = sample_quadratures(
        config.state(), config.chain, config.run.samples, config.seed);
    write_quadratures(join_path(out_dir, "quadratures.csv"), x);
    outputs["quadratures.csv"] = x.size();
  }
  if (trials.traces > 0) {
    const SourceModel source = config.source();
    const std::vector<HomodyneTrace> traces = synth_traces(
        source, config.chain, config.grid, trials.traces, config.seed);
    write_traces(join_path(out_dir, "traces.csv"), traces);
    outputs["traces.csv"] = traces.size();
  }
  if (trials.clicks > 0) {
    const SourceModel source = config.source();
    const std::vector<ClickRecord> clicks =
        sample_clicks(source, config.chain, trials.clicks, config.seed);
    write_clicks(join_path(out_dir, "clicks.csv"), clicks);
    outputs["clicks.csv"] = clicks.size();
  }
  if (!config.decay.delays.empty()) {
    const DecayCurve curve = synth_decay(config);
    write_decay(join_path(out_dir, "decay.csv"), curve);
    outputs["decay.csv"] = curve.delays.size();
  }

  nlohmann::json manifest = manifest_base(config, "simulate");
  manifest["outputs"] = std::move(outputs);
  if (trials.heralded) manifest["heralded_trials"] = *trials.heralded;
  write_json(join_path(out_dir, "manifest.json"), manifest);
}

void run_reconstruct(const ExperimentConfig& config,
                     const std::string& data_dir, const std::string& out_dir,
                     ReconMode mode) {
  const std::vector<double> samples =
      read_quadratures(join_path(data_dir, "quadratures.csv"));
  ensure_dir(out_dir);

  const std::vector<double> xs = grid_axis(config.wigner.x_max,
                                           config.wigner.step);
  const std::vector<double> ps = grid_axis(config.wigner.p_max,
                                           config.wigner.step);

  nlohmann::json result = manifest_base(config, "reconstruct");
  result["samples_used"] = samples.size();
  nlohmann::json variants = nlohmann::json::object();

  struct Variant {
    const char* name;
    bool corrected;
  };
  std::vector<Variant> selected;
  if (mode != ReconMode::corrected) selected.push_back({"raw", false});
  if (mode != ReconMode::raw) selected.push_back({"corrected", true});

  for (const Variant& variant : selected) {
    const ReconstructionSettings settings =
        config.recon_settings(variant.corrected);
    const ReconstructionResult recon = maxlik_diagonal(samples, settings);

    std::string wigner_csv = "x,p,w\n";
    wigner_csv.reserve(wigner_csv.size() + xs.size() * ps.size() * 40);
    for (double x : xs) {
      for (double p : ps) {
        wigner_csv += format_double(x);
        wigner_csv += ',';
        wigner_csv += format_double(p);
        wigner_csv += ',';
        wigner_csv += format_double(wigner(recon.state, x, p));
        wigner_csv += '\n';
      }
    }
    const std::string wigner_name =
        std::string("wigner_") + variant.name + ".csv";
    atomic_write_file(join_path(out_dir, wigner_name.c_str()), wigner_csv);

    std::string marginal_csv = "x,pdf\n";
    for (double x : xs) {
      marginal_csv += format_double(x);
      marginal_csv += ',';
      marginal_csv += format_double(quadrature_pdf(recon.state, x));
      marginal_csv += '\n';
    }
    const std::string marginal_name =
        std::string("marginal_") + variant.name + ".csv";
    atomic_write_file(join_path(out_dir, marginal_name.c_str()), marginal_csv);

    nlohmann::json entry{
        {"populations", recon.state.populations()},
        {"loglik", recon.loglik},
        {"iterations", recon.iterations},
        {"converged", recon.converged},
        {"w_origin", wigner(recon.state, 0.0, 0.0)},
        {"mean_photon", recon.state.mean_photon()},
        {"wigner_file", wigner_name},
        {"marginal_file", marginal_name},
    };
    if (config.bootstrap_resamples >= kMinBootstrapResamples) {
      entry["errors"] = bootstrap_errors(samples, settings,
                                         config.bootstrap_resamples,
                                         config.seed);
    }
    variants[variant.name] = std::move(entry);
  }

  result["reconstructions"] = std::move(variants);
  write_json(join_path(out_dir, "reconstruction.json"), result);
}

void run_analyze(const ExperimentConfig& config, const std::string& data_dir,
                 const std::string& out_dir) {
  const TrialCounts trials = effective_trials(config);

  // Read every dataset the config asks for before writing anything, so a
  // missing file cannot leave a partial analysis behind.
  std::vector<ClickRecord> records;
  std::vector<HomodyneTrace> traces;
  DecayCurve curve;
  if (trials.clicks > 0) {
    records = read_clicks(join_path(data_dir, "clicks.csv"));
  }
  if (trials.traces > 0) {
    traces = read_traces(join_path(data_dir, "traces.csv"), config.grid);
  }
  if (!config.decay.delays.empty()) {
    curve = read_decay(join_path(data_dir, "decay.csv"));
  }

  ensure_dir(out_dir);
  nlohmann::json summary = manifest_base(config, "analyze");

  if (trials.clicks > 0) {
    std::string g2_csv = "tau,g2,stderr\n";
    for (int tau = -config.run.g2_tau_max; tau <= config.run.g2_tau_max;
         ++tau) {
      const G2Estimate est = g2_from_counts(std::span<const ClickRecord>(records),
                                            tau, kG2BootstrapResamples,
                                            config.seed);
      g2_csv += std::to_string(tau);
      g2_csv += ',';
      g2_csv += format_double(est.value);
      g2_csv += ',';
      g2_csv += format_double(est.stderr_value);
      g2_csv += '\n';
      if (tau == 0) {
        summary["g2_zero"] = {{"value", est.value},
                              {"stderr", est.stderr_value}};
      }
    }
    atomic_write_file(join_path(out_dir, "g2.csv"), g2_csv);

    const ArrivalHistogram h2 =
        arrival_histogram(records, DetectorSelect::spcm2);
    const ArrivalHistogram h3 =
        arrival_histogram(records, DetectorSelect::spcm3);
    std::string arrivals_csv = "bin,t_start_s,count2,count3\n";
    if (!h2.counts.empty() || !h3.counts.empty()) {
      std::int32_t lo = std::numeric_limits<std::int32_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      for (const ArrivalHistogram* h : {&h2, &h3}) {
        if (h->counts.empty()) continue;
        lo = std::min(lo, h->first_bin);
        hi = std::max(hi, h->first_bin +
                              static_cast<std::int64_t>(h->counts.size()));
      }
      for (std::int64_t bin = lo; bin < hi; ++bin) {
        const auto b = static_cast<std::int32_t>(bin);
        arrivals_csv += std::to_string(bin);
        arrivals_csv += ',';
        arrivals_csv += format_double(bin * kClickBinWidth);
        arrivals_csv += ',';
        arrivals_csv += std::to_string(hist_count(h2, b));
        arrivals_csv += ',';
        arrivals_csv += std::to_string(hist_count(h3, b));
        arrivals_csv += '\n';
      }
    }
    atomic_write_file(join_path(out_dir, "arrivals.csv"), arrivals_csv);
    summary["g2_theory"] = g2_theory(config.state());
  }

  if (trials.traces > 0) {
    const std::vector<WidthScanPoint> scan = filter_width_scan(
        traces, config.mode_center, config.scan.widths);
    std::string scan_csv = "sigma_s,variance\n";
    for (const WidthScanPoint& point : scan) {
      scan_csv += format_double(point.sigma);
      scan_csv += ',';
      scan_csv += format_double(point.variance);
      scan_csv += '\n';
    }
    atomic_write_file(join_path(out_dir, "filter_scan.csv"), scan_csv);
    summary["sigma_opt"] = optimize_filter_width(traces, config.mode_center,
                                                 config.scan.widths);

    const TemporalMode filter = config.mode();
    std::vector<double> reference;
    reference.reserve(traces.size());
    for (const HomodyneTrace& trace : traces) {
      reference.push_back(vacuum_reference(trace, filter, kVacuumShift));
    }
    if (reference.size() >= 2) {
      summary["vacuum_variance"] = sample_variance(reference);
      summary["vacuum_shift"] = kVacuumShift;
    }
  }

  if (!config.decay.delays.empty()) {
    const DecayFit fit = fit_gaussian_decay(curve);
    summary["decay"] = {{"tau", fit.tau},
                        {"eta0", fit.eta0},
                        {"rms_residual", fit.rms_residual},
                        {"ill_conditioned", fit.ill_conditioned},
                        {"iterations", fit.iterations}};
  }

  write_json(join_path(out_dir, "analysis_summary.json"), summary);
}

void run_report(const ExperimentConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const DiagonalState state = config.state();
  const double coop = config.physics.cooperativity;
  const AtomParams atom{config.physics.mass_amu, config.physics.temperature,
                        config.physics.wavelength};
  const EfficiencyBudget budget = efficiency_budget(config.chain);

  nlohmann::json report = manifest_base(config, "report");
  report["cooperativity"] = coop;
  report["eta_max"] = eta_max(coop);
  report["doppler_time"] = doppler_time(atom);
  report["efficiency"] = {{"eta_hd", budget.eta_hd},
                          {"eta_mode", budget.eta_mode},
                          {"eta_q", budget.eta_q},
                          {"eta_det", budget.eta_det}};
  nlohmann::json source{{"populations", state.populations()},
                        {"mean_photon", state.mean_photon()},
                        {"w_origin", wigner(state, 0.0, 0.0)}};
  if (state.mean_photon() > 0.0) {
    source["g2_theory"] = g2_theory(state);
  }
  report["source"] = std::move(source);

  std::string text;
  auto line = [&text](const char* name, double value) {
    text += name;
    const std::size_t pad = 18;
    const std::size_t len = std::string(name).size();
    text.append(len < pad ? pad - len : 1, ' ');
    text += format_double(value);
    text += '\n';
  };
  line("cooperativity", coop);
  line("eta_max", eta_max(coop));
  line("doppler_time_s", doppler_time(atom));
  line("eta_hd", budget.eta_hd);
  line("eta_mode", budget.eta_mode);
  line("eta_q", budget.eta_q);
  line("eta_det", budget.eta_det);
  line("mean_photon", state.mean_photon());
  if (state.mean_photon() > 0.0) line("g2_theory", g2_theory(state));
  line("w_origin", wigner(state, 0.0, 0.0));
  atomic_write_file(join_path(out_dir, "report.txt"), text);
  write_json(join_path(out_dir, "report.json"), report);
}

}  // namespace qhot
