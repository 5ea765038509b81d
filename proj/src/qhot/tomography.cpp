#include "qhot/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qhot/errors.hpp"
#include "qhot/parallel.hpp"
#include "qhot/rng.hpp"

namespace qhot {

namespace {

constexpr std::uint64_t kSaltBootstrap = 0x626f6f7473747261ULL;

void check_samples(std::span<const double> samples, const KernelGrid& grid) {
  if (samples.size() < 100) {
    throw std::invalid_argument(
        "reconstruction needs at least 100 samples, got " +
        std::to_string(samples.size()));
  }
  double lo = samples[0];
  double hi = samples[0];
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double x = samples[j];
    if (!std::isfinite(x)) {
      throw std::invalid_argument("sample " + std::to_string(j) +
                                  " is not finite");
    }
    if (!grid.contains(x)) {
      throw std::invalid_argument(
          "sample " + std::to_string(j) + " (x = " + std::to_string(x) +
          ") lies outside the kernel grid [-" + std::to_string(grid.x_max) +
          ", " + std::to_string(grid.x_max) +
          "]; data look clipped or unscaled");
    }
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) {
    throw std::invalid_argument("all samples are identical (x = " +
                                std::to_string(lo) + "), nothing to fit");
  }
}

// Kernel values interpolated once per sample: row j holds G_0..G_N at x_j.
std::vector<double> interpolated_matrix(std::span<const double> samples,
                                        const MeasurementKernel& kernel) {
  const int n_comp = kernel.cutoff() + 1;
  std::vector<double> matrix(samples.size() * static_cast<std::size_t>(n_comp));
  parallel_chunks(
      static_cast<std::int64_t>(samples.size()), kDefaultChunk,
      [&](std::int64_t begin, std::int64_t end, std::size_t) {
        for (std::int64_t j = begin; j < end; ++j) {
          double* row = matrix.data() + j * n_comp;
          for (int n = 0; n < n_comp; ++n) {
            row[n] = kernel.value(n, samples[static_cast<std::size_t>(j)]);
          }
        }
      });
  return matrix;
}

struct EmAccum {
  std::vector<double> responsibility;
  double loglik = 0.0;
};

// One expectation pass. weights may be empty (all ones) or hold one
// non-negative integer weight per sample.
EmAccum em_pass(const std::vector<double>& matrix, std::size_t n_samples,
                int n_comp, const std::vector<double>& p,
                std::span<const std::int64_t> weights) {
  const std::size_t n_chunks =
      chunk_count(static_cast<std::int64_t>(n_samples), kDefaultChunk);
  std::vector<EmAccum> partial(n_chunks);
  for (auto& acc : partial) {
    acc.responsibility.assign(static_cast<std::size_t>(n_comp), 0.0);
  }
  parallel_chunks(
      static_cast<std::int64_t>(n_samples), kDefaultChunk,
      [&](std::int64_t begin, std::int64_t end, std::size_t chunk) {
        EmAccum& acc = partial[chunk];
        // One log call per batch of densities instead of one per sample; the
        // product stays well inside double range between flushes.
        constexpr int kLogBatch = 16;
        constexpr double kLogFloor = 1e-100;
        double prod = 1.0;
        int batched = 0;
        const auto flush = [&] {
          if (batched > 0) {
            acc.loglik += std::log(prod);
            prod = 1.0;
            batched = 0;
          }
        };
        for (std::int64_t j = begin; j < end; ++j) {
          const std::int64_t w =
              weights.empty() ? 1 : weights[static_cast<std::size_t>(j)];
          if (w == 0) continue;
          const double* row = matrix.data() + j * n_comp;
          double total = 0.0;
          for (int n = 0; n < n_comp; ++n) total += p[static_cast<std::size_t>(n)] * row[n];
          if (!(total > 0.0)) {
            throw NumericError("sample " + std::to_string(j) +
                               " has zero model density");
          }
          const double inv = static_cast<double>(w) / total;
          for (int n = 0; n < n_comp; ++n) {
            acc.responsibility[static_cast<std::size_t>(n)] += row[n] * inv;
          }
          if (total < kLogFloor) {
            flush();
            acc.loglik += static_cast<double>(w) * std::log(total);
            continue;
          }
          for (std::int64_t k = 0; k < w; ++k) {
            if (batched == kLogBatch || prod < kLogFloor) flush();
            prod *= total;
            ++batched;
          }
        }
        flush();
      });
  EmAccum out;
  out.responsibility.assign(static_cast<std::size_t>(n_comp), 0.0);
  for (const auto& acc : partial) {
    out.loglik += acc.loglik;
    for (int n = 0; n < n_comp; ++n) {
      out.responsibility[static_cast<std::size_t>(n)] +=
          acc.responsibility[static_cast<std::size_t>(n)];
    }
  }
  return out;
}

ReconstructionResult run_em(const std::vector<double>& matrix,
                            std::size_t n_samples,
                            const ReconstructionSettings& settings,
                            std::span<const std::int64_t> weights) {
  const int n_comp = settings.cutoff + 1;
  double total_weight = 0.0;
  if (weights.empty()) {
    total_weight = static_cast<double>(n_samples);
  } else {
    for (std::int64_t w : weights) total_weight += static_cast<double>(w);
  }

  std::vector<double> p(static_cast<std::size_t>(n_comp),
                        1.0 / static_cast<double>(n_comp));
  ReconstructionResult result;
  EmAccum pass = em_pass(matrix, n_samples, n_comp, p, weights);
  result.loglik_trace.push_back(pass.loglik / total_weight);

  for (int it = 0; it < settings.max_iter; ++it) {
    for (int n = 0; n < n_comp; ++n) {
      p[static_cast<std::size_t>(n)] *=
          pass.responsibility[static_cast<std::size_t>(n)] / total_weight;
    }
    double norm = 0.0;
    for (double v : p) norm += v;
    for (double& v : p) v /= norm;

    const double prev = result.loglik_trace.back();
    pass = em_pass(matrix, n_samples, n_comp, p, weights);
    result.loglik_trace.push_back(pass.loglik / total_weight);
    result.iterations = it + 1;
    if (std::abs(result.loglik_trace.back() - prev) <
        settings.tol * (1.0 + std::abs(result.loglik_trace.back()))) {
      result.converged = true;
      break;
    }
  }
  result.loglik = result.loglik_trace.back();
  result.state = DiagonalState(std::move(p));
  return result;
}

}  // namespace

void ReconstructionSettings::validate() const {
  if (cutoff < 1 || cutoff > kMaxFockIndex) {
    throw std::invalid_argument("ReconstructionSettings: cutoff out of range");
  }
  if (!(eta_assumed > 0.0) || eta_assumed > 1.0) {
    throw std::invalid_argument(
        "ReconstructionSettings: eta_assumed must be in (0, 1]");
  }
  if (!(nu_assumed >= 0.0)) {
    throw std::invalid_argument(
        "ReconstructionSettings: nu_assumed must be >= 0");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("ReconstructionSettings: tol must be > 0");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("ReconstructionSettings: max_iter must be >= 1");
  }
}

ReconstructionResult maxlik_diagonal(std::span<const double> samples,
                                     const ReconstructionSettings& settings) {
  settings.validate();
  check_samples(samples, settings.grid);
  const MeasurementKernel kernel(settings.eta_assumed, settings.nu_assumed,
                                 settings.cutoff, settings.grid);
  const std::vector<double> matrix = interpolated_matrix(samples, kernel);
  return run_em(matrix, samples.size(), settings, {});
}

double loglikelihood(std::span<const double> samples,
                     const DiagonalState& state,
                     const MeasurementKernel& kernel) {
  if (state.cutoff() != kernel.cutoff()) {
    throw std::invalid_argument("loglikelihood: cutoff mismatch");
  }
  if (samples.empty()) {
    throw std::invalid_argument("loglikelihood: no samples");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (!kernel.grid().contains(samples[j])) {
      throw std::invalid_argument("sample " + std::to_string(j) +
                                  " lies outside the kernel grid");
    }
    const double density = kernel.response(state, samples[j]);
    if (!(density > 0.0)) {
      throw NumericError("sample " + std::to_string(j) + " (x = " +
                         std::to_string(samples[j]) +
                         ") has zero model density");
    }
    total += std::log(density);
  }
  return total / static_cast<double>(samples.size());
}

std::vector<double> bootstrap_errors(std::span<const double> samples,
                                     const ReconstructionSettings& settings,
                                     int n_resamples, std::uint64_t seed) {
  settings.validate();
  check_samples(samples, settings.grid);
  if (n_resamples < kMinBootstrapResamples) {
    throw std::invalid_argument(
        "bootstrap_errors: need at least " +
        std::to_string(kMinBootstrapResamples) + " resamples, got " +
        std::to_string(n_resamples));
  }
  const MeasurementKernel kernel(settings.eta_assumed, settings.nu_assumed,
                                 settings.cutoff, settings.grid);
  const std::vector<double> matrix = interpolated_matrix(samples, kernel);
  const std::size_t n_samples = samples.size();
  const int n_comp = settings.cutoff + 1;

  std::vector<double> mean(static_cast<std::size_t>(n_comp), 0.0);
  std::vector<double> sq(static_cast<std::size_t>(n_comp), 0.0);
  std::vector<std::int64_t> weights(n_samples);
  for (int b = 0; b < n_resamples; ++b) {
    // Multinomial resample weights: sequential binomial splits of n_samples
    // draws over the uniformly weighted samples.
    Rng rng = Rng::for_stream(seed ^ kSaltBootstrap,
                              static_cast<std::uint64_t>(b));
    std::int64_t remaining = static_cast<std::int64_t>(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
      const std::int64_t left = static_cast<std::int64_t>(n_samples - j);
      const std::int64_t draw =
          (j + 1 == n_samples)
              ? remaining
              : rng.binomial(remaining, 1.0 / static_cast<double>(left));
      weights[j] = draw;
      remaining -= draw;
    }
    const ReconstructionResult fit = run_em(matrix, n_samples, settings, weights);
    for (int n = 0; n < n_comp; ++n) {
      const double v = fit.state.population(n);
      mean[static_cast<std::size_t>(n)] += v;
      sq[static_cast<std::size_t>(n)] += v * v;
    }
  }
  std::vector<double> err(static_cast<std::size_t>(n_comp));
  for (int n = 0; n < n_comp; ++n) {
    const double m = mean[static_cast<std::size_t>(n)] / n_resamples;
    const double var =
        std::max(0.0, sq[static_cast<std::size_t>(n)] / n_resamples - m * m);
    err[static_cast<std::size_t>(n)] =
        std::sqrt(var * n_resamples / (n_resamples - 1.0));
  }
  return err;
}

}  // namespace qhot
