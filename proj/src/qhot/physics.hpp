#pragma once

#include <vector>

#include "qhot/sampler.hpp"

namespace qhot {

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kRb87MassAmu = 86.909180;

// Atom-cavity coupling parameters in angular units (rad/s); n_atoms scales
// the single-atom cooperativity for a collective emitter.
struct CavityParams {
  double g = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double n_atoms = 1.0;

  void validate() const;
};

// C = N g^2 / (kappa gamma).
double cooperativity(const CavityParams& params);

// Intracavity retrieval bound C / (1 + C).
double eta_max(double cooperativity);

struct AtomParams {
  double mass_amu = kRb87MassAmu;
  double temperature = 0.0;  // K
  double wavelength = 0.0;   // m

  void validate() const;
};

// 1/e time of the thermal-motion dephasing envelope for a spin wave written
// with wavevector difference 2k: tau = sqrt(m / (k_B T)) / (2 k), k = 2 pi /
// wavelength.
double doppler_time(const AtomParams& params);

// Model envelope exp(-(delay / tau_D)^2).
double doppler_envelope(double delay, const AtomParams& params);

// Measured retrieval efficiency versus storage delay.
struct DecayCurve {
  std::vector<double> delays;        // seconds, strictly increasing
  std::vector<double> efficiencies;  // in (0, 1]

  void validate() const;
};

struct DecayFit {
  double eta0 = 0.0;
  double tau = 0.0;
  double rms_residual = 0.0;
  bool ill_conditioned = false;
  int iterations = 0;
};

// Least-squares fit of eta(dt) = eta0 exp(-(dt/tau)^2): log-linear regression
// for the starting point, then damped Gauss-Newton (at most 100 iterations).
// A curve with no resolvable decay over the scanned window is reported with
// tau pinned to 10x the window span and ill_conditioned set.
DecayFit fit_gaussian_decay(const DecayCurve& curve);

// Multiplicative decomposition of the homodyne detection efficiency.
struct EfficiencyBudget {
  double eta_hd = 0.0;    // photodiode quantum efficiency
  double eta_mode = 0.0;  // squared mode-matching visibility
  double eta_q = 0.0;     // circuit transmission
  double eta_det = 0.0;   // product
};

EfficiencyBudget efficiency_budget(const DetectionChain& chain);

}  // namespace qhot
