#pragma once

#include <cstdint>
#include <vector>

#include "qhot/counting.hpp"
#include "qhot/fock.hpp"
#include "qhot/rng.hpp"
#include "qhot/temporal.hpp"

namespace qhot {

// Efficiencies and noise of the measurement chain. eta_det is the homodyne
// detection efficiency: photodiode quantum efficiency times squared
// mode-matching visibility times circuit transmission. eta_c is the
// conditional retrieval efficiency seen by the counting detectors. nu is the
// electronic noise variance in shot-noise units (vacuum variance 1/2 adds
// nu/2).
struct DetectionChain {
  double eta_hd = 1.0;
  double eta_m = 1.0;
  double eta_q = 1.0;
  double nu = 0.0;
  double eta_c = 1.0;

  double eta_det() const { return eta_hd * eta_m * eta_m * eta_q; }
  void validate() const;
};

// Photon source: diagonal photon-number statistics emitted into one temporal
// mode, heralded at the given per-write-pulse rate.
struct SourceModel {
  DiagonalState state;
  TemporalMode mode;
  double herald_rate = 1e-3;

  void validate() const;
};

// Largest Fock index accepted by the quadrature rejection sampler (envelope
// constants are tabulated up to here).
inline constexpr int kMaxSampledFock = 64;

// Exact draw from |psi_n(x)|^2 by rejection against a normal proposal of
// variance n + 1/2.
double sample_fock_quadrature(int n, Rng& rng);

// count quadrature draws from the state as seen through the chain: Fock index
// from the loss-degraded populations (eta_det), then a |psi_n|^2 draw, then
// electronic noise of variance nu/2. Sample i depends only on (seed, i), so
// results are identical for any worker count.
std::vector<double> sample_quadratures(const DiagonalState& state,
                                       const DetectionChain& chain,
                                       std::int64_t count, std::uint64_t seed);

// Heralded homodyne record synthesis. Each trace is white vacuum noise of
// per-sample variance 1/2, with the component along the source mode replaced
// by a quadrature draw from the loss-degraded state, plus white electronic
// noise of per-sample variance nu/2. Filtering a trace with the source mode
// then reproduces the sample_quadratures statistics exactly, and any
// orthogonal filter sees vacuum plus noise.
class TraceSynthesizer {
 public:
  TraceSynthesizer(const SourceModel& source, const DetectionChain& chain,
                   const TimeGrid& grid);

  // Trace for one heralded trial; deterministic in (seed, trial_id).
  HomodyneTrace trace(std::uint64_t seed, std::int64_t trial_id) const;

  const TemporalMode& mode() const { return mode_; }
  const DiagonalState& degraded_state() const { return degraded_; }

 private:
  DiagonalState degraded_;
  TemporalMode mode_;
  TimeGrid grid_;
  double noise_sigma_;
};

HomodyneTrace synth_trace(const SourceModel& source,
                          const DetectionChain& chain, const TimeGrid& grid,
                          std::uint64_t seed, std::int64_t trial_id = 0);

std::vector<HomodyneTrace> synth_traces(const SourceModel& source,
                                        const DetectionChain& chain,
                                        const TimeGrid& grid,
                                        std::int64_t trials,
                                        std::uint64_t seed);

// Photon-counting synthesis for one heralded trial: Fock index from the
// source populations, binomial thinning by eta_c, a 50:50 split onto the two
// counting detectors, and per-click arrival times drawn from the mode's
// intensity envelope, timestamped in 10 ns bins.
std::vector<ClickRecord> sample_clicks(const SourceModel& source,
                                       const DetectionChain& chain,
                                       std::int64_t trials,
                                       std::uint64_t seed);

// Memory-lean counting synthesis for large trial counts: identical draws to
// sample_clicks (same seed gives the same counts and times), but keeps only
// per-trial counts and the aggregated arrival histograms.
struct ClickStats {
  std::vector<std::uint8_t> n2;
  std::vector<std::uint8_t> n3;
  ArrivalHistogram hist2;
  ArrivalHistogram hist3;
};

ClickStats sample_click_stats(const SourceModel& source,
                              const DetectionChain& chain, std::int64_t trials,
                              std::uint64_t seed);

}  // namespace qhot
