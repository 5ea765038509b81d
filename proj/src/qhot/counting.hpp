#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qhot/fock.hpp"

namespace qhot {

// SPCM timestamp resolution.
inline constexpr double kClickBinWidth = 10e-9;

// Counts and arrival bins registered by the two counting detectors during one
// heralded trial. Arrival times are stored as indices of 10 ns bins.
struct ClickRecord {
  std::int64_t trial_id = 0;
  int n2 = 0;
  int n3 = 0;
  std::vector<std::int32_t> times2;
  std::vector<std::int32_t> times3;

  void validate() const;
};

// Contiguous histogram of 10 ns arrival bins.
struct ArrivalHistogram {
  double bin_width = kClickBinWidth;
  std::int32_t first_bin = 0;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
  void add(std::int32_t bin);
  void merge(const ArrivalHistogram& other);
};

enum class DetectorSelect { spcm2, spcm3, both };

// Histogram of arrival bins over all records for the selected detector(s).
// Total counts are preserved.
ArrivalHistogram arrival_histogram(std::span<const ClickRecord> records,
                                   DetectorSelect which);

// Normalized intensity correlation estimate at a trial offset tau. tau counts
// trigger events, not lab time: it pairs the counts of trial i on one
// detector with trial i+tau on the other.
struct G2Estimate {
  int tau = 0;
  double value = 0.0;
  double stderr_value = 0.0;
};

inline constexpr int kG2BootstrapResamples = 1000;

// g2(tau) = <n2(i) n3(i+tau)> / (<n2><n3>) over the valid pair window, with a
// bootstrap standard error over trials. Throws when either detector saw no
// clicks at all (undefined ratio).
G2Estimate g2_from_counts(std::span<const std::uint8_t> n2,
                          std::span<const std::uint8_t> n3, int tau,
                          int n_bootstrap = kG2BootstrapResamples,
                          std::uint64_t seed = 0);
G2Estimate g2_from_counts(std::span<const ClickRecord> records, int tau,
                          int n_bootstrap = kG2BootstrapResamples,
                          std::uint64_t seed = 0);

// Analytic g2 of a diagonal state: sum_n n(n-1) p_n / (sum_n n p_n)^2.
// Invariant under binomial loss. Throws for states with zero mean photon
// number.
double g2_theory(const DiagonalState& state);

}  // namespace qhot
