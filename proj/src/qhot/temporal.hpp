#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qhot {

// Uniform sampling grid for homodyne records. The defaults give 2.2 us of
// data at a 250 MHz sampling rate.
struct TimeGrid {
  double dt = 4e-9;
  int n_samples = 550;

  double time(int i) const { return dt * i; }
  double span() const { return dt * n_samples; }
  bool operator==(const TimeGrid&) const = default;

  void validate() const;
};

// Analytic parameters of a Gaussian-shaped mode. sigma is the 1/e half-width
// of the amplitude envelope (the Gaussian standard deviation is sigma/sqrt2).
struct GaussianShape {
  double center = 0.0;
  double sigma = 0.0;
};

// Normalized amplitude envelope on a time grid; sum a_i^2 = 1.
class TemporalMode {
 public:
  TemporalMode(TimeGrid grid, std::vector<double> amplitudes,
               std::optional<GaussianShape> shape = std::nullopt);

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> amplitudes() const { return amplitudes_; }
  const std::optional<GaussianShape>& shape() const { return shape_; }

  // Copy of the mode displaced by shift seconds. Gaussian-parameterized modes
  // are regenerated analytically; sampled modes are shifted by whole bins and
  // must keep their support inside the grid.
  TemporalMode shifted(double shift) const;

 private:
  TimeGrid grid_;
  std::vector<double> amplitudes_;
  std::optional<GaussianShape> shape_;
};

// Unit-norm Gaussian mode, amplitude a_i ~ exp(-(t_i-center)^2/(2 (sigma/sqrt2)^2)).
// Fails if more than 1e-6 of the envelope's mass falls outside the grid.
TemporalMode gaussian_mode(const TimeGrid& grid, double center, double sigma);

// Discrete inner product sum_i f_i g_i; modes must share a grid.
double mode_overlap(const TemporalMode& f, const TemporalMode& g);

// One heralded homodyne record.
struct HomodyneTrace {
  TimeGrid grid;
  std::vector<double> samples;
  std::int64_t trial_id = 0;

  void validate() const;
};

// x = sum_i h_i f_i, in vacuum-normalized units (variance 1/2 for vacuum
// input under any unit-norm filter).
double extract_quadrature(const HomodyneTrace& trace, const TemporalMode& f);

// Maximum filter/reference overlap accepted by vacuum_reference.
inline constexpr double kOrthogonalityThreshold = 1e-3;

// Quadrature of the temporally orthogonal mode obtained by displacing the
// filter by shift seconds; used to calibrate the vacuum level. Throws if the
// displaced filter is not orthogonal enough (reports the actual overlap).
double vacuum_reference(const HomodyneTrace& trace, const TemporalMode& f,
                        double shift);

struct WidthScanPoint {
  double sigma = 0.0;     // candidate amplitude 1/e half-width, seconds
  double variance = 0.0;  // sample variance of the extracted quadratures
};

// Sample variance of extracted quadratures for each candidate filter width,
// in ascending width order. Deterministic for any worker count.
std::vector<WidthScanPoint> filter_width_scan(
    std::span<const HomodyneTrace> traces, double center,
    std::span<const double> widths);

// Width maximizing the extracted-quadrature variance (the photon fraction is
// monotone in it for phase-averaged states); ties break toward the smaller
// width. Requires >= 3 candidate widths and a non-empty trace set.
double optimize_filter_width(std::span<const HomodyneTrace> traces,
                             double center, std::span<const double> widths);

}  // namespace qhot
