#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qhot.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::string data;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::int64_t trials = 0;
  bool has_trials = false;
  std::int64_t samples = 0;
  bool has_samples = false;
  std::string grid;
};

qhot_run_options build_options(const CommonArgs& args, bool* grid_ok) {
  qhot_run_options options{};
  options.has_seed = args.has_seed ? 1 : 0;
  options.seed = args.seed;
  options.has_trials = args.has_trials ? 1 : 0;
  options.trials = args.trials;
  options.has_samples = args.has_samples ? 1 : 0;
  options.samples = args.samples;
  *grid_ok = true;
  if (!args.grid.empty()) {
    double values[3];
    const char* p = args.grid.data();
    const char* end = p + args.grid.size();
    for (int i = 0; i < 3; ++i) {
      const auto res = std::from_chars(p, end, values[i]);
      if (res.ec != std::errc{}) {
        *grid_ok = false;
        return options;
      }
      p = res.ptr;
      const bool expect_comma = i < 2;
      if (expect_comma && (p == end || *p != ',')) {
        *grid_ok = false;
        return options;
      }
      if (expect_comma) ++p;
    }
    if (p != end) {
      *grid_ok = false;
      return options;
    }
    options.has_wigner_grid = 1;
    options.wigner_x_max = values[0];
    options.wigner_p_max = values[1];
    options.wigner_step = values[2];
  }
  return options;
}

int finish(qhot_status status) {
  if (status == QHOT_OK) return 0;
  std::fprintf(stderr, "qhot: %s\n", qhot_last_error());
  return status == QHOT_ERR_CONFIG ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded single-photon experiment simulator and state "
               "reconstruction toolkit"};
  app.footer("Set QHOT_WORKERS to cap the worker thread count; results are\n"
             "identical for any value.");
  app.set_version_flag("--version", []() { return qhot_version(); });
  app.require_subcommand(1);

  CommonArgs args;
  bool raw_only = false;
  bool corrected_only = false;

  auto add_config_out = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out", args.out, "output directory")->required();
  };
  auto add_seed = [&args](CLI::App* cmd) {
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.has_seed = true; });
  };
  auto add_data = [&args](CLI::App* cmd) {
    cmd->add_option("--data", args.data,
                    "dataset directory (default: the --out directory)");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "synthesize datasets from a config");
  add_config_out(simulate);
  add_seed(simulate);
  simulate->add_option("--trials", args.trials,
                       "override the trace and click trial counts")
      ->each([&args](const std::string&) { args.has_trials = true; });
  simulate->add_option("--samples", args.samples,
                       "override the quadrature sample count")
      ->each([&args](const std::string&) { args.has_samples = true; });

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "maximum-likelihood state reconstruction");
  add_config_out(reconstruct);
  add_data(reconstruct);
  add_seed(reconstruct);
  auto* raw_flag =
      reconstruct->add_flag("--raw", raw_only, "raw reconstruction only");
  reconstruct
      ->add_flag("--correct", corrected_only,
                 "loss-corrected reconstruction only")
      ->excludes(raw_flag);
  reconstruct->add_option("--grid", args.grid,
                          "Wigner grid as x_max,p_max,step");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "correlation, filter-scan and decay analyses");
  add_config_out(analyze);
  add_data(analyze);
  add_seed(analyze);

  CLI::App* report =
      app.add_subcommand("report", "derived quantities of the configured setup");
  add_config_out(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  bool grid_ok = true;
  const qhot_run_options options = build_options(args, &grid_ok);
  if (!grid_ok) {
    std::fprintf(stderr, "qhot: --grid expects x_max,p_max,step\n");
    return 1;
  }
  const std::string data_dir = args.data.empty() ? args.out : args.data;

  if (simulate->parsed()) {
    return finish(
        qhot_run_simulate(args.config.c_str(), args.out.c_str(), &options));
  }
  if (reconstruct->parsed()) {
    const qhot_recon_mode mode = raw_only         ? QHOT_RECON_RAW
                                 : corrected_only ? QHOT_RECON_CORRECTED
                                                  : QHOT_RECON_BOTH;
    return finish(qhot_run_reconstruct(args.config.c_str(), data_dir.c_str(),
                                       args.out.c_str(), mode, &options));
  }
  if (analyze->parsed()) {
    return finish(qhot_run_analyze(args.config.c_str(), data_dir.c_str(),
                                   args.out.c_str(), &options));
  }
  return finish(
      qhot_run_report(args.config.c_str(), args.out.c_str(), &options));
}
