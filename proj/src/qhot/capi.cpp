#include "qhot.h"

#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>

#include "qhot/config.hpp"
#include "qhot/counting.hpp"
#include "qhot/errors.hpp"
#include "qhot/fock.hpp"
#include "qhot/physics.hpp"
#include "qhot/pipeline.hpp"
#include "qhot/version.hpp"

struct qhot_state {
  qhot::DiagonalState impl;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
qhot_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QHOT_OK;
  } catch (const qhot::ConfigError& err) {
    g_last_error = err.what();
    return QHOT_ERR_CONFIG;
  } catch (const qhot::IoError& err) {
    g_last_error = err.what();
    return QHOT_ERR_IO;
  } catch (const qhot::NumericError& err) {
    g_last_error = err.what();
    return QHOT_ERR_NUMERIC;
  } catch (const std::invalid_argument& err) {
    g_last_error = err.what();
    return QHOT_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return QHOT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return QHOT_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

qhot::ExperimentConfig load_with_overrides(const char* config_path,
                                           const qhot_run_options* options) {
  require(config_path != nullptr, "config_path is null");
  qhot::ExperimentConfig config = qhot::load_config(config_path);
  qhot::RunOverrides overrides;
  if (options != nullptr) {
    if (options->has_seed) overrides.seed = options->seed;
    if (options->has_trials) overrides.trials = options->trials;
    if (options->has_samples) overrides.samples = options->samples;
    if (options->has_wigner_grid) {
      overrides.grid = qhot::WignerGridSpec{
          options->wigner_x_max, options->wigner_p_max, options->wigner_step};
    }
  }
  return qhot::apply_overrides(std::move(config), overrides);
}

}  // namespace

extern "C" {

const char* qhot_version(void) { return qhot::kVersion; }

const char* qhot_last_error(void) { return g_last_error.c_str(); }

qhot_status qhot_state_create(const double* populations, size_t count,
                              qhot_state** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(populations != nullptr || count == 0, "populations is null");
    *out = new qhot_state{qhot::DiagonalState(
        std::vector<double>(populations, populations + count))};
  });
}

void qhot_state_free(qhot_state* state) { delete state; }

qhot_status qhot_state_populations(const qhot_state* state, double* out,
                                   size_t capacity, size_t* count) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(count != nullptr, "count is null");
    const std::vector<double>& p = state->impl.populations();
    *count = p.size();
    if (out == nullptr && capacity == 0) return;
    require(out != nullptr, "out is null");
    require(capacity >= p.size(), "buffer too small for populations");
    std::memcpy(out, p.data(), p.size() * sizeof(double));
  });
}

qhot_status qhot_state_apply_loss(const qhot_state* state, double eta,
                                  qhot_state** out) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(out != nullptr, "out is null");
    *out = new qhot_state{qhot::apply_loss(state->impl, eta)};
  });
}

qhot_status qhot_state_mean_photon(const qhot_state* state, double* out) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(out != nullptr, "out is null");
    *out = state->impl.mean_photon();
  });
}

qhot_status qhot_state_g2(const qhot_state* state, double* out) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(out != nullptr, "out is null");
    *out = qhot::g2_theory(state->impl);
  });
}

qhot_status qhot_state_wigner(const qhot_state* state, double x, double p,
                              double* out) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(out != nullptr, "out is null");
    *out = qhot::wigner(state->impl, x, p);
  });
}

qhot_status qhot_state_quadrature_pdf(const qhot_state* state, double x,
                                      double* out) {
  return guarded([&] {
    require(state != nullptr, "state is null");
    require(out != nullptr, "out is null");
    *out = qhot::quadrature_pdf(state->impl, x);
  });
}

qhot_status qhot_fock_wavefunction(int n, double x, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = qhot::fock_wavefunction(n, x);
  });
}

qhot_status qhot_eta_max(double cooperativity, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = qhot::eta_max(cooperativity);
  });
}

qhot_status qhot_doppler_time(double mass_amu, double temperature_k,
                              double wavelength_m, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = qhot::doppler_time(
        qhot::AtomParams{mass_amu, temperature_k, wavelength_m});
  });
}

qhot_status qhot_run_simulate(const char* config_path, const char* out_dir,
                              const qhot_run_options* options) {
  return guarded([&] {
    require(out_dir != nullptr, "out_dir is null");
    qhot::run_simulate(load_with_overrides(config_path, options), out_dir);
  });
}

qhot_status qhot_run_reconstruct(const char* config_path, const char* data_dir,
                                 const char* out_dir, qhot_recon_mode mode,
                                 const qhot_run_options* options) {
  return guarded([&] {
    require(data_dir != nullptr, "data_dir is null");
    require(out_dir != nullptr, "out_dir is null");
    qhot::ReconMode recon_mode;
    switch (mode) {
      case QHOT_RECON_RAW:
        recon_mode = qhot::ReconMode::raw;
        break;
      case QHOT_RECON_CORRECTED:
        recon_mode = qhot::ReconMode::corrected;
        break;
      case QHOT_RECON_BOTH:
        recon_mode = qhot::ReconMode::both;
        break;
      default:
        throw std::invalid_argument("invalid reconstruction mode");
    }
    qhot::run_reconstruct(load_with_overrides(config_path, options), data_dir,
                          out_dir, recon_mode);
  });
}

qhot_status qhot_run_analyze(const char* config_path, const char* data_dir,
                             const char* out_dir,
                             const qhot_run_options* options) {
  return guarded([&] {
    require(data_dir != nullptr, "data_dir is null");
    require(out_dir != nullptr, "out_dir is null");
    qhot::run_analyze(load_with_overrides(config_path, options), data_dir,
                      out_dir);
  });
}

qhot_status qhot_run_report(const char* config_path, const char* out_dir,
                            const qhot_run_options* options) {
  return guarded([&] {
    require(out_dir != nullptr, "out_dir is null");
    qhot::run_report(load_with_overrides(config_path, options), out_dir);
  });
}

}  // extern "C"
