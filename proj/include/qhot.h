/* C interface to the heralded single-photon simulation and tomography
 * toolkit. All functions return a status code; on failure the thread-local
 * message from qhot_last_error() describes what went wrong. Pointers returned
 * through out-parameters are only valid when the call returned QHOT_OK. */

#ifndef QHOT_H
#define QHOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qhot_status {
  QHOT_OK = 0,
  QHOT_ERR_INVALID_ARGUMENT = 1,
  QHOT_ERR_CONFIG = 2,
  QHOT_ERR_IO = 3,
  QHOT_ERR_NUMERIC = 4,
  QHOT_ERR_INTERNAL = 5
} qhot_status;

/* Library version string, e.g. "0.1.0". */
const char* qhot_version(void);

/* Message of the most recent failing call on this thread; empty string if the
 * most recent call succeeded. The buffer stays valid until the next call. */
const char* qhot_last_error(void);

/* Diagonal Fock-basis state (population vector, normalized on creation). */
typedef struct qhot_state qhot_state;

/* Creates a state from count populations p_0..p_{count-1}. The vector is
 * normalized; entries must be non-negative with a positive sum. */
qhot_status qhot_state_create(const double* populations, size_t count,
                              qhot_state** out);
void qhot_state_free(qhot_state* state);

/* Copies the populations into out (capacity entries available) and stores the
 * population count in *count. With out == NULL and capacity == 0 only the
 * count is reported. */
qhot_status qhot_state_populations(const qhot_state* state, double* out,
                                   size_t capacity, size_t* count);

/* Binomial loss channel with transmission eta in (0, 1]. */
qhot_status qhot_state_apply_loss(const qhot_state* state, double eta,
                                  qhot_state** out);

qhot_status qhot_state_mean_photon(const qhot_state* state, double* out);

/* Normalized second-order correlation sum n(n-1)p_n / (sum n p_n)^2; fails
 * for states with zero mean photon number. */
qhot_status qhot_state_g2(const qhot_state* state, double* out);

/* Wigner function at phase-space point (x, p), vacuum variance 1/2. */
qhot_status qhot_state_wigner(const qhot_state* state, double x, double p,
                              double* out);

/* Quadrature distribution P(x) = sum_n p_n |psi_n(x)|^2. */
qhot_status qhot_state_quadrature_pdf(const qhot_state* state, double x,
                                      double* out);

/* Oscillator eigenfunction psi_n(x), 0 <= n <= 200. */
qhot_status qhot_fock_wavefunction(int n, double x, double* out);

/* Intracavity retrieval bound C / (1 + C). */
qhot_status qhot_eta_max(double cooperativity, double* out);

/* 1/e time of the thermal-motion dephasing envelope,
 * sqrt(m / (k_B T)) / (2 k) with k = 2 pi / wavelength. */
qhot_status qhot_doppler_time(double mass_amu, double temperature_k,
                              double wavelength_m, double* out);

/* Which reconstruction variants a run emits. */
typedef enum qhot_recon_mode {
  QHOT_RECON_RAW = 0,
  QHOT_RECON_CORRECTED = 1,
  QHOT_RECON_BOTH = 2
} qhot_recon_mode;

/* Optional overrides applied on top of the config file; pass NULL or zero
 * the has_ flags to use the file values. trials replaces both the trace and
 * the click trial counts. */
typedef struct qhot_run_options {
  int has_seed;
  uint64_t seed;
  int has_trials;
  int64_t trials;
  int has_samples;
  int64_t samples;
  int has_wigner_grid;
  double wigner_x_max;
  double wigner_p_max;
  double wigner_step;
} qhot_run_options;

/* Pipeline commands. config_path names a JSON experiment description;
 * datasets are read from data_dir and results written into out_dir. Every
 * output is deterministic in (config, seed) for any worker count (set the
 * QHOT_WORKERS environment variable to cap threads). */
qhot_status qhot_run_simulate(const char* config_path, const char* out_dir,
                              const qhot_run_options* options);
qhot_status qhot_run_reconstruct(const char* config_path, const char* data_dir,
                                 const char* out_dir, qhot_recon_mode mode,
                                 const qhot_run_options* options);
qhot_status qhot_run_analyze(const char* config_path, const char* data_dir,
                             const char* out_dir,
                             const qhot_run_options* options);
qhot_status qhot_run_report(const char* config_path, const char* out_dir,
                            const qhot_run_options* options);

#ifdef __cplusplus
}
#endif

#endif /* QHOT_H */
