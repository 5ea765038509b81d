#pragma once

#include <span>
#include <vector>

namespace qhot {

// Recurrence validity bound for the oscillator eigenfunctions.
inline constexpr int kMaxFockIndex = 200;

// Phase-averaged state: Fock populations p_0..p_cutoff. Populations are
// non-negative and are normalized to unit sum on construction.
class DiagonalState {
 public:
  explicit DiagonalState(std::vector<double> populations);

  static DiagonalState vacuum(int cutoff);
  static DiagonalState fock(int n, int cutoff);
  // Poisson populations with mean nbar, truncated at cutoff and renormalized.
  static DiagonalState truncated_poisson(double nbar, int cutoff);

  int cutoff() const { return static_cast<int>(populations_.size()) - 1; }
  const std::vector<double>& populations() const { return populations_; }
  double population(int n) const;
  double mean_photon() const;

 private:
  std::vector<double> populations_;
};

// Oscillator eigenfunction psi_n(x) in the convention where the vacuum
// quadrature variance is 1/2: psi_n = pi^(-1/4) (2^n n!)^(-1/2) H_n(x)
// exp(-x^2/2). Evaluated by the normalized three-term recurrence; no explicit
// factorials. Throws for n < 0 or n > kMaxFockIndex.
double fock_wavefunction(int n, double x);

// P(x) = sum_n p_n |psi_n(x)|^2.
double quadrature_pdf(const DiagonalState& state, double x);

// Binomial loss channel with transmission eta in (0, 1]. Cutoff preserved.
DiagonalState apply_loss(const DiagonalState& state, double eta);

// Uniform symmetric tabulation grid [-x_max, x_max] for measurement kernels.
struct KernelGrid {
  double x_max = 8.0;
  double step = 0.01;

  int size() const;
  double x(int i) const { return -x_max + step * i; }
  bool contains(double x) const { return x >= -x_max && x <= x_max; }
};

// Tabulated detection kernels G_n(x): the quadrature density produced by Fock
// state n after binomial loss eta and additive Gaussian electronic noise of
// variance nu/2. For eta = 1, nu = 0 the rows are exactly |psi_n(x)|^2.
// Construction fails if any row does not integrate to 1 within 1e-8 on the
// grid (grid too coarse or too narrow).
class MeasurementKernel {
 public:
  MeasurementKernel(double eta, double nu, int cutoff, KernelGrid grid = {});

  // Linear interpolation on the tabulation grid; x must lie inside the grid.
  double value(int n, double x) const;
  // sum_n p_n G_n(x) for a state with matching cutoff.
  double response(const DiagonalState& state, double x) const;

  double eta() const { return eta_; }
  double nu() const { return nu_; }
  int cutoff() const { return cutoff_; }
  const KernelGrid& grid() const { return grid_; }
  std::span<const double> row(int n) const;

 private:
  double eta_;
  double nu_;
  int cutoff_;
  KernelGrid grid_;
  std::vector<double> table_;  // (cutoff+1) rows of grid.size() values
};

// W(x,p) of a diagonal state, normalized so that the Wigner function
// integrates to 1 over the phase plane; W_n(x,p) = ((-1)^n/pi) L_n(2s) e^(-s)
// with s = x^2 + p^2.
double wigner(const DiagonalState& state, double x, double p);

// Marginal int W(x,p) dp, evaluated by trapezoid quadrature over p. Equals
// quadrature_pdf within quadrature accuracy.
double wigner_marginal(const DiagonalState& state, double x);

namespace detail {
// Binomial pmf C(n,m) p^m (1-p)^(n-m), stable for the index range used here.
double binomial_pmf(int n, int m, double p);
}  // namespace detail

}  // namespace qhot
