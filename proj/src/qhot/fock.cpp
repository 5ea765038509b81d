#include "qhot/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qhot/errors.hpp"

namespace qhot {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kQuarticRootPiInv = 0.7511255444649424828587030047762;  // pi^(-1/4)
constexpr double kRowIntegralTol = 1e-8;

double trapezoid_row_integral(std::span<const double> row, double step) {
  double sum = 0.0;
  for (double v : row) sum += v;
  sum -= 0.5 * (row.front() + row.back());
  return sum * step;
}

}  // namespace

DiagonalState::DiagonalState(std::vector<double> populations)
    : populations_(std::move(populations)) {
  if (populations_.size() < 2)
    throw std::invalid_argument("DiagonalState: cutoff must be >= 1");
  if (populations_.size() > static_cast<std::size_t>(kMaxFockIndex + 1))
    throw std::invalid_argument("DiagonalState: cutoff exceeds " +
                                std::to_string(kMaxFockIndex));
  double sum = 0.0;
  for (double p : populations_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("DiagonalState: populations must be >= 0");
    sum += p;
  }
  if (!(sum > 0.0))
    throw std::invalid_argument("DiagonalState: populations sum to zero");
  for (double& p : populations_) p /= sum;
}

DiagonalState DiagonalState::vacuum(int cutoff) { return fock(0, cutoff); }

DiagonalState DiagonalState::fock(int n, int cutoff) {
  if (n < 0 || n > cutoff)
    throw std::invalid_argument("DiagonalState::fock: need 0 <= n <= cutoff");
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
  p[static_cast<std::size_t>(n)] = 1.0;
  return DiagonalState(std::move(p));
}

DiagonalState DiagonalState::truncated_poisson(double nbar, int cutoff) {
  if (!(nbar >= 0.0))
    throw std::invalid_argument("truncated_poisson: nbar must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
  double term = std::exp(-nbar);
  for (int n = 0; n <= cutoff; ++n) {
    p[static_cast<std::size_t>(n)] = term;
    term *= nbar / static_cast<double>(n + 1);
  }
  return DiagonalState(std::move(p));  // constructor renormalizes
}

double DiagonalState::population(int n) const {
  if (n < 0 || n > cutoff())
    throw std::invalid_argument("population: index out of range");
  return populations_[static_cast<std::size_t>(n)];
}

double DiagonalState::mean_photon() const {
  double nbar = 0.0;
  for (int n = 1; n <= cutoff(); ++n)
    nbar += static_cast<double>(n) * populations_[static_cast<std::size_t>(n)];
  return nbar;
}

double fock_wavefunction(int n, double x) {
  if (n < 0) throw std::invalid_argument("fock_wavefunction: n must be >= 0");
  if (n > kMaxFockIndex)
    throw std::invalid_argument("fock_wavefunction: n exceeds limit " +
                                std::to_string(kMaxFockIndex));
  // psi_{k+1} = x sqrt(2/(k+1)) psi_k - sqrt(k/(k+1)) psi_{k-1}
  double prev = 0.0;
  double cur = kQuarticRootPiInv * std::exp(-0.5 * x * x);
  for (int k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double next =
        x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double quadrature_pdf(const DiagonalState& state, double x) {
  // one pass of the recurrence instead of cutoff+1 separate evaluations
  double prev = 0.0;
  double cur = kQuarticRootPiInv * std::exp(-0.5 * x * x);
  double pdf = state.populations()[0] * cur * cur;
  for (int k = 0; k < state.cutoff(); ++k) {
    const double kd = static_cast<double>(k);
    const double next =
        x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
    pdf += state.populations()[static_cast<std::size_t>(k) + 1] * cur * cur;
  }
  return pdf;
}

namespace detail {

double binomial_pmf(int n, int m, double p) {
  if (m < 0 || m > n) return 0.0;
  if (p <= 0.0) return m == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return m == n ? 1.0 : 0.0;
  // C(n,m) by multiplicative recurrence; exact in double well past n = 50,
  // which covers every cutoff this toolkit accepts for loss channels.
  double coeff = 1.0;
  for (int i = 1; i <= m; ++i)
    coeff *= static_cast<double>(n - m + i) / static_cast<double>(i);
  const double log_pow = static_cast<double>(m) * std::log(p) +
                         static_cast<double>(n - m) * std::log1p(-p);
  return coeff * std::exp(log_pow);
}

}  // namespace detail

DiagonalState apply_loss(const DiagonalState& state, double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("apply_loss: eta must be in (0, 1]");
  const int cutoff = state.cutoff();
  std::vector<double> out(static_cast<std::size_t>(cutoff) + 1, 0.0);
  for (int n = 0; n <= cutoff; ++n) {
    const double pn = state.populations()[static_cast<std::size_t>(n)];
    if (pn == 0.0) continue;
    for (int m = 0; m <= n; ++m)
      out[static_cast<std::size_t>(m)] += detail::binomial_pmf(n, m, eta) * pn;
  }
  return DiagonalState(std::move(out));
}

int KernelGrid::size() const {
  if (!(x_max > 0.0) || !(step > 0.0))
    throw std::invalid_argument("KernelGrid: x_max and step must be > 0");
  return 2 * static_cast<int>(std::round(x_max / step)) + 1;
}

MeasurementKernel::MeasurementKernel(double eta, double nu, int cutoff,
                                     KernelGrid grid)
    : eta_(eta), nu_(nu), cutoff_(cutoff), grid_(grid) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("MeasurementKernel: eta must be in (0, 1]");
  if (!(nu >= 0.0))
    throw std::invalid_argument("MeasurementKernel: nu must be >= 0");
  if (cutoff < 1 || cutoff > kMaxFockIndex)
    throw std::invalid_argument("MeasurementKernel: invalid cutoff");

  const int npts = grid_.size();
  // snap x_max to an exact multiple of the step so grid.x(i) is uniform
  grid_.x_max = 0.5 * grid_.step * (npts - 1);

  // |psi_m(x)|^2 for all m <= cutoff on the grid
  std::vector<double> psi2(static_cast<std::size_t>(cutoff + 1) *
                           static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i) {
    const double x = grid_.x(i);
    double prev = 0.0;
    double cur = kQuarticRootPiInv * std::exp(-0.5 * x * x);
    psi2[static_cast<std::size_t>(i)] = cur * cur;
    for (int k = 0; k < cutoff; ++k) {
      const double kd = static_cast<double>(k);
      const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur -
                          std::sqrt(kd / (kd + 1.0)) * prev;
      prev = cur;
      cur = next;
      psi2[static_cast<std::size_t>(k + 1) * npts + i] = cur * cur;
    }
  }

  // loss mixing: G_n = sum_m Binom(n, m; eta) |psi_m|^2
  table_.assign(static_cast<std::size_t>(cutoff + 1) *
                    static_cast<std::size_t>(npts),
                0.0);
  for (int n = 0; n <= cutoff; ++n) {
    double* row = table_.data() + static_cast<std::size_t>(n) * npts;
    for (int m = 0; m <= n; ++m) {
      const double w = detail::binomial_pmf(n, m, eta);
      if (w == 0.0) continue;
      const double* src = psi2.data() + static_cast<std::size_t>(m) * npts;
      for (int i = 0; i < npts; ++i) row[i] += w * src[i];
    }
  }

  // electronic noise: convolve each row with a zero-mean Gaussian of
  // variance nu/2, discretized on the same grid and normalized to unit mass
  if (nu_ > 0.0) {
    const double sigma = std::sqrt(0.5 * nu_);
    const int half = static_cast<int>(std::ceil(8.0 * sigma / grid_.step));
    std::vector<double> g(static_cast<std::size_t>(2 * half) + 1);
    double mass = 0.0;
    for (int j = -half; j <= half; ++j) {
      const double t = static_cast<double>(j) * grid_.step;
      const double v = std::exp(-0.5 * t * t / (sigma * sigma));
      g[static_cast<std::size_t>(j + half)] = v;
      mass += v;
    }
    for (double& v : g) v /= mass;

    std::vector<double> conv(static_cast<std::size_t>(npts));
    for (int n = 0; n <= cutoff; ++n) {
      double* row = table_.data() + static_cast<std::size_t>(n) * npts;
      for (int i = 0; i < npts; ++i) {
        double acc = 0.0;
        const int jlo = std::max(-half, i - (npts - 1));
        const int jhi = std::min(half, i);
        for (int j = jlo; j <= jhi; ++j)
          acc += g[static_cast<std::size_t>(j + half)] * row[i - j];
        conv[static_cast<std::size_t>(i)] = acc;
      }
      std::copy(conv.begin(), conv.end(), row);
    }
  }

  for (int n = 0; n <= cutoff; ++n) {
    const double integral = trapezoid_row_integral(row(n), grid_.step);
    if (std::fabs(integral - 1.0) > kRowIntegralTol)
      throw NumericError(
          "MeasurementKernel: row " + std::to_string(n) + " integrates to " +
          std::to_string(integral) +
          "; tabulation grid is too coarse or too narrow");
  }
}

std::span<const double> MeasurementKernel::row(int n) const {
  if (n < 0 || n > cutoff_)
    throw std::invalid_argument("MeasurementKernel::row: n out of range");
  const int npts = grid_.size();
  return {table_.data() + static_cast<std::size_t>(n) * npts,
          static_cast<std::size_t>(npts)};
}

double MeasurementKernel::value(int n, double x) const {
  if (n < 0 || n > cutoff_)
    throw std::invalid_argument("MeasurementKernel::value: n out of range");
  if (!grid_.contains(x))
    throw std::invalid_argument("MeasurementKernel::value: x outside grid");
  const int npts = grid_.size();
  const double pos = (x + grid_.x_max) / grid_.step;
  int i = static_cast<int>(pos);
  if (i >= npts - 1) i = npts - 2;
  const double frac = pos - static_cast<double>(i);
  const double* row = table_.data() + static_cast<std::size_t>(n) * npts;
  return row[i] + frac * (row[i + 1] - row[i]);
}

double MeasurementKernel::response(const DiagonalState& state, double x) const {
  if (state.cutoff() != cutoff_)
    throw std::invalid_argument("MeasurementKernel::response: cutoff mismatch");
  double sum = 0.0;
  for (int n = 0; n <= cutoff_; ++n)
    sum += state.populations()[static_cast<std::size_t>(n)] * value(n, x);
  return sum;
}

double wigner(const DiagonalState& state, double x, double p) {
  const double s = x * x + p * p;
  const double z = 2.0 * s;
  // Laguerre recurrence: (k+1) L_{k+1} = (2k+1-z) L_k - k L_{k-1}
  double lag_prev = 0.0;
  double lag = 1.0;
  double sum = state.populations()[0];
  double sign = 1.0;
  for (int k = 0; k < state.cutoff(); ++k) {
    const double kd = static_cast<double>(k);
    const double lag_next =
        ((2.0 * kd + 1.0 - z) * lag - kd * lag_prev) / (kd + 1.0);
    lag_prev = lag;
    lag = lag_next;
    sign = -sign;
    sum += sign * state.populations()[static_cast<std::size_t>(k) + 1] * lag;
  }
  return sum * std::exp(-s) / kPi;
}

double wigner_marginal(const DiagonalState& state, double x) {
  const double p_max = 8.0;
  const double step = 0.005;
  const int npts = 2 * static_cast<int>(std::round(p_max / step)) + 1;
  double sum = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double p = -p_max + step * i;
    const double w = wigner(state, x, p);
    sum += (i == 0 || i == npts - 1) ? 0.5 * w : w;
  }
  return sum * step;
}

}  // namespace qhot
