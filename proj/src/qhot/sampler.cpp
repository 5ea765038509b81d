#include "qhot/sampler.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "qhot/errors.hpp"
#include "qhot/parallel.hpp"

namespace qhot {

namespace {

constexpr std::uint64_t kSaltQuadrature = 0x71756164726174ULL;
constexpr std::uint64_t kSaltTrace = 0x7472616365ULL;
constexpr std::uint64_t kSaltClicks = 0x636c69636b73ULL;

double gauss_pdf(double x, double sigma) {
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  const double z = x / sigma;
  return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

// Rejection envelope constant M_n with max_x |psi_n(x)|^2 <= M_n q_n(x) for
// the N(0, n + 1/2) proposal q_n, found by a dense scan and padded by 5%.
double compute_envelope(int n) {
  const double sigma = std::sqrt(n + 0.5);
  const double x_max = std::sqrt(2.0 * n + 1.0) + 6.0;
  const double step = 1e-3 * sigma;
  double worst = 0.0;
  for (double x = 0.0; x <= x_max; x += step) {
    const double psi = fock_wavefunction(n, x);
    const double ratio = psi * psi / gauss_pdf(x, sigma);
    if (ratio > worst) worst = ratio;
  }
  return worst * 1.05;
}

double envelope_constant(int n) {
  static std::array<std::once_flag, kMaxSampledFock + 1> flags;
  static std::array<double, kMaxSampledFock + 1> table;
  std::call_once(flags[static_cast<std::size_t>(n)],
                 [n] { table[static_cast<std::size_t>(n)] = compute_envelope(n); });
  return table[static_cast<std::size_t>(n)];
}

std::int32_t time_to_bin(double t) {
  return static_cast<std::int32_t>(std::floor(t / kClickBinWidth));
}

// Arrival time from the mode's intensity envelope |a(t)|^2. Gaussian modes
// are sampled analytically (intensity std = sigma/2); sampled modes draw a
// bin by its squared amplitude and jitter uniformly inside it.
std::int32_t sample_arrival_bin(const TemporalMode& mode, Rng& rng) {
  if (mode.shape()) {
    const double t = rng.normal(mode.shape()->center, 0.5 * mode.shape()->sigma);
    return time_to_bin(t);
  }
  const auto probs = mode.amplitudes();
  std::vector<double> intensity(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    intensity[i] = probs[i] * probs[i];
  }
  const int i = rng.categorical(intensity);
  const double t = mode.grid().time(i) + rng.uniform() * mode.grid().dt;
  return time_to_bin(t);
}

}  // namespace

void DetectionChain::validate() const {
  const auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(eta_hd) || !in_unit(eta_m) || !in_unit(eta_q)) {
    throw std::invalid_argument(
        "DetectionChain: eta_hd, eta_m, eta_q must be in (0, 1]");
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("DetectionChain: nu must be finite and >= 0");
  }
  if (!in_unit(eta_c)) {
    throw std::invalid_argument("DetectionChain: eta_c must be in (0, 1]");
  }
}

void SourceModel::validate() const {
  if (!(herald_rate > 0.0) || herald_rate > 1.0) {
    throw std::invalid_argument("SourceModel: herald_rate must be in (0, 1]");
  }
}

double sample_fock_quadrature(int n, Rng& rng) {
  if (n < 0 || n > kMaxSampledFock) {
    throw std::invalid_argument("sample_fock_quadrature: n must be in [0, " +
                                std::to_string(kMaxSampledFock) + "]");
  }
  if (n == 0) return rng.normal(0.0, std::sqrt(0.5));
  const double sigma = std::sqrt(n + 0.5);
  const double m = envelope_constant(n);
  for (;;) {
    const double x = rng.normal(0.0, sigma);
    const double psi = fock_wavefunction(n, x);
    if (rng.uniform() * m * gauss_pdf(x, sigma) <= psi * psi) return x;
  }
}

std::vector<double> sample_quadratures(const DiagonalState& state,
                                       const DetectionChain& chain,
                                       std::int64_t count,
                                       std::uint64_t seed) {
  chain.validate();
  if (count < 1) {
    throw std::invalid_argument("sample_quadratures: count must be >= 1");
  }
  if (state.cutoff() > kMaxSampledFock) {
    throw std::invalid_argument(
        "sample_quadratures: state cutoff exceeds sampler limit");
  }
  const DiagonalState degraded = apply_loss(state, chain.eta_det());
  const double noise_sigma = std::sqrt(0.5 * chain.nu);
  std::vector<double> out(static_cast<std::size_t>(count));
  parallel_chunks(count, kDefaultChunk,
                  [&](std::int64_t begin, std::int64_t end, std::size_t) {
                    for (std::int64_t i = begin; i < end; ++i) {
                      Rng rng = Rng::for_stream(seed ^ kSaltQuadrature,
                                                static_cast<std::uint64_t>(i));
                      const int n = rng.categorical(degraded.populations());
                      double x = sample_fock_quadrature(n, rng);
                      if (noise_sigma > 0.0) x += rng.normal(0.0, noise_sigma);
                      out[static_cast<std::size_t>(i)] = x;
                    }
                  });
  return out;
}

TraceSynthesizer::TraceSynthesizer(const SourceModel& source,
                                   const DetectionChain& chain,
                                   const TimeGrid& grid)
    : degraded_(apply_loss(source.state, chain.eta_det())),
      mode_(source.mode),
      grid_(grid),
      noise_sigma_(std::sqrt(0.5 * chain.nu)) {
  chain.validate();
  source.validate();
  grid.validate();
  if (!(mode_.grid() == grid)) {
    throw std::invalid_argument("TraceSynthesizer: mode grid != trace grid");
  }
  if (degraded_.cutoff() > kMaxSampledFock) {
    throw std::invalid_argument(
        "TraceSynthesizer: state cutoff exceeds sampler limit");
  }
}

HomodyneTrace TraceSynthesizer::trace(std::uint64_t seed,
                                      std::int64_t trial_id) const {
  Rng rng =
      Rng::for_stream(seed ^ kSaltTrace, static_cast<std::uint64_t>(trial_id));
  const int n = rng.categorical(degraded_.populations());
  const double x_signal = sample_fock_quadrature(n, rng);

  const auto phi = mode_.amplitudes();
  const std::size_t len = phi.size();
  std::vector<double> h(len);
  const double vac_sigma = std::sqrt(0.5);
  double proj = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    h[i] = rng.normal(0.0, vac_sigma);
    proj += h[i] * phi[i];
  }
  // Replace the in-mode vacuum component with the signal draw; orthogonal
  // components are untouched.
  const double delta = x_signal - proj;
  for (std::size_t i = 0; i < len; ++i) h[i] += delta * phi[i];
  if (noise_sigma_ > 0.0) {
    for (std::size_t i = 0; i < len; ++i) {
      h[i] += rng.normal(0.0, noise_sigma_);
    }
  }
  return HomodyneTrace{grid_, std::move(h), trial_id};
}

HomodyneTrace synth_trace(const SourceModel& source,
                          const DetectionChain& chain, const TimeGrid& grid,
                          std::uint64_t seed, std::int64_t trial_id) {
  return TraceSynthesizer(source, chain, grid).trace(seed, trial_id);
}

std::vector<HomodyneTrace> synth_traces(const SourceModel& source,
                                        const DetectionChain& chain,
                                        const TimeGrid& grid,
                                        std::int64_t trials,
                                        std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("synth_traces: trials must be >= 1");
  }
  const TraceSynthesizer synth(source, chain, grid);
  std::vector<HomodyneTrace> out(static_cast<std::size_t>(trials));
  parallel_chunks(trials, kDefaultChunk,
                  [&](std::int64_t begin, std::int64_t end, std::size_t) {
                    for (std::int64_t i = begin; i < end; ++i) {
                      out[static_cast<std::size_t>(i)] = synth.trace(seed, i);
                    }
                  });
  return out;
}

namespace {

// Shared trial draw for both counting entry points; the draw order is part
// of the reproducibility contract.
ClickRecord draw_click_trial(const SourceModel& source,
                             const DetectionChain& chain, std::uint64_t seed,
                             std::int64_t trial_id) {
  Rng rng =
      Rng::for_stream(seed ^ kSaltClicks, static_cast<std::uint64_t>(trial_id));
  ClickRecord rec;
  rec.trial_id = trial_id;
  const int n = rng.categorical(source.state.populations());
  const int retrieved = static_cast<int>(rng.binomial(n, chain.eta_c));
  rec.n2 = static_cast<int>(rng.binomial(retrieved, 0.5));
  rec.n3 = retrieved - rec.n2;
  rec.times2.reserve(static_cast<std::size_t>(rec.n2));
  rec.times3.reserve(static_cast<std::size_t>(rec.n3));
  for (int k = 0; k < rec.n2; ++k) {
    rec.times2.push_back(sample_arrival_bin(source.mode, rng));
  }
  for (int k = 0; k < rec.n3; ++k) {
    rec.times3.push_back(sample_arrival_bin(source.mode, rng));
  }
  return rec;
}

}  // namespace

std::vector<ClickRecord> sample_clicks(const SourceModel& source,
                                       const DetectionChain& chain,
                                       std::int64_t trials,
                                       std::uint64_t seed) {
  source.validate();
  chain.validate();
  if (trials < 1) {
    throw std::invalid_argument("sample_clicks: trials must be >= 1");
  }
  std::vector<ClickRecord> records(static_cast<std::size_t>(trials));
  parallel_chunks(trials, kDefaultChunk,
                  [&](std::int64_t begin, std::int64_t end, std::size_t) {
                    for (std::int64_t i = begin; i < end; ++i) {
                      records[static_cast<std::size_t>(i)] =
                          draw_click_trial(source, chain, seed, i);
                    }
                  });
  return records;
}

ClickStats sample_click_stats(const SourceModel& source,
                              const DetectionChain& chain, std::int64_t trials,
                              std::uint64_t seed) {
  source.validate();
  chain.validate();
  if (trials < 1) {
    throw std::invalid_argument("sample_click_stats: trials must be >= 1");
  }
  ClickStats stats;
  stats.n2.resize(static_cast<std::size_t>(trials));
  stats.n3.resize(static_cast<std::size_t>(trials));

  const std::size_t n_chunks = chunk_count(trials, kDefaultChunk);
  std::vector<ArrivalHistogram> hist2(n_chunks);
  std::vector<ArrivalHistogram> hist3(n_chunks);
  parallel_chunks(
      trials, kDefaultChunk,
      [&](std::int64_t begin, std::int64_t end, std::size_t chunk) {
        for (std::int64_t i = begin; i < end; ++i) {
          const ClickRecord rec = draw_click_trial(source, chain, seed, i);
          stats.n2[static_cast<std::size_t>(i)] =
              static_cast<std::uint8_t>(rec.n2);
          stats.n3[static_cast<std::size_t>(i)] =
              static_cast<std::uint8_t>(rec.n3);
          for (std::int32_t bin : rec.times2) hist2[chunk].add(bin);
          for (std::int32_t bin : rec.times3) hist3[chunk].add(bin);
        }
      });
  for (std::size_t c = 0; c < n_chunks; ++c) {
    stats.hist2.merge(hist2[c]);
    stats.hist3.merge(hist3[c]);
  }
  return stats;
}

}  // namespace qhot
