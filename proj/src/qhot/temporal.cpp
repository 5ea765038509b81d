#include "qhot/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qhot/errors.hpp"
#include "qhot/parallel.hpp"

namespace qhot {

namespace {

constexpr double kClippedMassTol = 1e-6;

double normalize(std::vector<double>& amplitudes) {
  double norm2 = 0.0;
  for (double a : amplitudes) norm2 += a * a;
  if (!(norm2 > 0.0))
    throw std::invalid_argument("TemporalMode: zero-norm amplitude vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& a : amplitudes) a *= inv;
  return norm2;
}

}  // namespace

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be > 0");
  if (n_samples < 2)
    throw std::invalid_argument("TimeGrid: n_samples must be >= 2");
}

TemporalMode::TemporalMode(TimeGrid grid, std::vector<double> amplitudes,
                           std::optional<GaussianShape> shape)
    : grid_(grid), amplitudes_(std::move(amplitudes)), shape_(shape) {
  grid_.validate();
  if (amplitudes_.size() != static_cast<std::size_t>(grid_.n_samples))
    throw std::invalid_argument("TemporalMode: amplitude count != grid size");
  normalize(amplitudes_);
}

TemporalMode TemporalMode::shifted(double shift) const {
  if (shape_) return gaussian_mode(grid_, shape_->center + shift, shape_->sigma);
  // sampled mode: whole-bin displacement, zero fill
  const auto bins = static_cast<std::int64_t>(std::llround(shift / grid_.dt));
  std::vector<double> out(amplitudes_.size(), 0.0);
  double clipped = 0.0;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(amplitudes_.size());
       ++i) {
    const std::int64_t j = i + bins;
    const double a = amplitudes_[static_cast<std::size_t>(i)];
    if (j < 0 || j >= static_cast<std::int64_t>(out.size()))
      clipped += a * a;
    else
      out[static_cast<std::size_t>(j)] = a;
  }
  if (clipped > kClippedMassTol)
    throw std::invalid_argument(
        "TemporalMode::shifted: " + std::to_string(clipped) +
        " of the mode mass falls outside the grid");
  return TemporalMode(grid_, std::move(out));
}

TemporalMode gaussian_mode(const TimeGrid& grid, double center, double sigma) {
  grid.validate();
  if (!(sigma > 0.0))
    throw std::invalid_argument("gaussian_mode: sigma must be > 0");
  // 1/e amplitude half-width sigma corresponds to std sigma/sqrt2
  const double sigma_g = sigma / std::sqrt(2.0);

  // intensity tail mass outside [0, span] of the continuous envelope
  const double t_lo = 0.0;
  const double t_hi = grid.time(grid.n_samples - 1);
  const double tail = 0.5 * std::erfc((t_hi - center) / sigma_g) +
                      0.5 * std::erfc((center - t_lo) / sigma_g);
  if (tail > kClippedMassTol)
    throw std::invalid_argument(
        "gaussian_mode: envelope clipped by the grid (outside mass " +
        std::to_string(tail) + ")");

  std::vector<double> amp(static_cast<std::size_t>(grid.n_samples));
  for (int i = 0; i < grid.n_samples; ++i) {
    const double u = (grid.time(i) - center) / sigma_g;
    amp[static_cast<std::size_t>(i)] = std::exp(-0.5 * u * u);
  }
  return TemporalMode(grid, std::move(amp), GaussianShape{center, sigma});
}

double mode_overlap(const TemporalMode& f, const TemporalMode& g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("mode_overlap: grids differ");
  return std::inner_product(f.amplitudes().begin(), f.amplitudes().end(),
                            g.amplitudes().begin(), 0.0);
}

void HomodyneTrace::validate() const {
  grid.validate();
  if (samples.size() != static_cast<std::size_t>(grid.n_samples))
    throw std::invalid_argument("HomodyneTrace: sample count != grid size");
}

double extract_quadrature(const HomodyneTrace& trace, const TemporalMode& f) {
  if (!(trace.grid == f.grid()))
    throw std::invalid_argument("extract_quadrature: grids differ");
  return std::inner_product(trace.samples.begin(), trace.samples.end(),
                            f.amplitudes().begin(), 0.0);
}

double vacuum_reference(const HomodyneTrace& trace, const TemporalMode& f,
                        double shift) {
  const TemporalMode reference = f.shifted(shift);
  const double overlap = mode_overlap(f, reference);
  if (std::fabs(overlap) >= kOrthogonalityThreshold)
    throw std::invalid_argument(
        "vacuum_reference: shifted filter is not orthogonal (overlap " +
        std::to_string(overlap) + ", threshold " +
        std::to_string(kOrthogonalityThreshold) + ")");
  return extract_quadrature(trace, reference);
}

std::vector<WidthScanPoint> filter_width_scan(
    std::span<const HomodyneTrace> traces, double center,
    std::span<const double> widths) {
  if (traces.empty())
    throw std::invalid_argument("filter_width_scan: no traces");
  if (widths.empty())
    throw std::invalid_argument("filter_width_scan: no candidate widths");

  std::vector<double> sorted(widths.begin(), widths.end());
  std::sort(sorted.begin(), sorted.end());

  const TimeGrid grid = traces.front().grid;
  std::vector<WidthScanPoint> scan;
  scan.reserve(sorted.size());
  const std::int64_t n = static_cast<std::int64_t>(traces.size());
  for (double sigma : sorted) {
    const TemporalMode filter = gaussian_mode(grid, center, sigma);
    // per-chunk partial moments, reduced in chunk order
    const std::size_t n_chunks = chunk_count(n, kDefaultChunk);
    std::vector<double> sum(n_chunks, 0.0), sum2(n_chunks, 0.0);
    parallel_chunks(n, kDefaultChunk,
                    [&](std::int64_t begin, std::int64_t end, std::size_t c) {
                      double s = 0.0, s2 = 0.0;
                      for (std::int64_t i = begin; i < end; ++i) {
                        const double x = extract_quadrature(
                            traces[static_cast<std::size_t>(i)], filter);
                        s += x;
                        s2 += x * x;
                      }
                      sum[c] = s;
                      sum2[c] = s2;
                    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      s += sum[c];
      s2 += sum2[c];
    }
    const double mean = s / static_cast<double>(n);
    const double var = s2 / static_cast<double>(n) - mean * mean;
    scan.push_back({sigma, var});
  }
  return scan;
}

double optimize_filter_width(std::span<const HomodyneTrace> traces,
                             double center, std::span<const double> widths) {
  if (widths.size() < 3)
    throw std::invalid_argument(
        "optimize_filter_width: need at least 3 candidate widths");
  const auto scan = filter_width_scan(traces, center, widths);
  // scan is in ascending width order; strict > keeps the smaller width on ties
  double best_sigma = scan.front().sigma;
  double best_var = scan.front().variance;
  for (const auto& point : scan) {
    if (point.variance > best_var) {
      best_var = point.variance;
      best_sigma = point.sigma;
    }
  }
  return best_sigma;
}

}  // namespace qhot
