#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qhot/fock.hpp"

namespace qhot {

// Settings for diagonal maximum-likelihood reconstruction. eta_assumed and
// nu_assumed describe the detection chain folded into the measurement kernel:
// eta_assumed = 1, nu_assumed = 0 reconstructs the apparent (lossy) state,
// while setting them to the calibrated chain values corrects the loss and
// noise and recovers the source populations.
struct ReconstructionSettings {
  int cutoff = 10;
  double eta_assumed = 1.0;
  double nu_assumed = 0.0;
  double tol = 1e-10;
  int max_iter = 5000;
  KernelGrid grid;

  void validate() const;
};

struct ReconstructionResult {
  DiagonalState state = DiagonalState::vacuum(1);
  double loglik = 0.0;  // mean log-likelihood of the final iterate
  int iterations = 0;
  bool converged = false;
  // Mean log-likelihood per iteration; entry 0 is the uniform initializer,
  // one entry per expectation-maximization update after that. Non-decreasing.
  std::vector<double> loglik_trace;
};

// Expectation-maximization estimate of the Fock populations from quadrature
// samples: p_n <- p_n * (1/J) sum_j G_n(x_j) / P(x_j). Stops when the
// relative log-likelihood gain drops below tol or after max_iter updates.
// Requires at least 100 finite, non-constant samples inside the kernel grid.
// Deterministic for any worker count.
ReconstructionResult maxlik_diagonal(std::span<const double> samples,
                                     const ReconstructionSettings& settings);

// Mean log-likelihood (1/J) sum_j log P(x_j) of the samples for the given
// state under the kernel. Throws, naming the offending sample, if any sample
// has zero model density or lies outside the grid.
double loglikelihood(std::span<const double> samples, const DiagonalState& state,
                     const MeasurementKernel& kernel);

inline constexpr int kMinBootstrapResamples = 20;

// Bootstrap standard error of each reconstructed population: re-runs the
// estimator on multinomially reweighted copies of the sample set. Requires at
// least kMinBootstrapResamples resamples.
std::vector<double> bootstrap_errors(std::span<const double> samples,
                                     const ReconstructionSettings& settings,
                                     int n_resamples, std::uint64_t seed);

}  // namespace qhot
