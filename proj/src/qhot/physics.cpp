#include "qhot/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qhot/errors.hpp"

namespace qhot {

void CavityParams::validate() const {
  if (!(g > 0.0) || !(kappa > 0.0) || !(gamma > 0.0) || !(n_atoms > 0.0)) {
    throw std::invalid_argument("CavityParams: g, kappa, gamma, n_atoms must be > 0");
  }
}

double cooperativity(const CavityParams& params) {
  params.validate();
  return params.n_atoms * params.g * params.g / (params.kappa * params.gamma);
}

double eta_max(double cooperativity) {
  if (!(cooperativity >= 0.0)) {
    throw std::invalid_argument("eta_max: cooperativity must be >= 0");
  }
  return cooperativity / (1.0 + cooperativity);
}

void AtomParams::validate() const {
  if (!(mass_amu > 0.0) || !(temperature > 0.0) || !(wavelength > 0.0)) {
    throw std::invalid_argument(
        "AtomParams: mass, temperature, wavelength must be > 0");
  }
}

double doppler_time(const AtomParams& params) {
  params.validate();
  const double mass = params.mass_amu * kAtomicMassUnit;
  const double k = 2.0 * std::numbers::pi / params.wavelength;
  return std::sqrt(mass / (kBoltzmann * params.temperature)) / (2.0 * k);
}

double doppler_envelope(double delay, const AtomParams& params) {
  const double tau = doppler_time(params);
  const double z = delay / tau;
  return std::exp(-z * z);
}

void DecayCurve::validate() const {
  if (delays.size() != efficiencies.size()) {
    throw std::invalid_argument("DecayCurve: delays and efficiencies differ");
  }
  if (delays.size() < 3) {
    throw std::invalid_argument("DecayCurve: need at least 3 points");
  }
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (i > 0 && !(delays[i] > delays[i - 1])) {
      throw std::invalid_argument(
          "DecayCurve: delays must be strictly increasing");
    }
    if (!(efficiencies[i] > 0.0) || efficiencies[i] > 1.0) {
      throw std::invalid_argument("DecayCurve: efficiencies must be in (0, 1]");
    }
  }
}

namespace {

// Parameters (a, s): model a * exp(-s t^2), tau = 1/sqrt(s).
double cost(const DecayCurve& c, double a, double s) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.delays.size(); ++i) {
    const double r =
        c.efficiencies[i] - a * std::exp(-s * c.delays[i] * c.delays[i]);
    total += r * r;
  }
  return total;
}

}  // namespace

DecayFit fit_gaussian_decay(const DecayCurve& curve) {
  curve.validate();
  const std::size_t n = curve.delays.size();
  const double span = curve.delays.back() - curve.delays.front();
  const double s_floor = 1.0 / (100.0 * span * span);  // tau = 10 * span

  // Starting point: least squares on log eta = log a - s t^2.
  double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = curve.delays[i] * curve.delays[i];
    const double v = std::log(curve.efficiencies[i]);
    su += u;
    sv += v;
    suu += u * u;
    suv += u * v;
  }
  const double dn = static_cast<double>(n);
  const double det = dn * suu - su * su;
  double s = det > 0.0 ? -(dn * suv - su * sv) / det : s_floor;
  double a = std::exp((sv + s * su) / dn);
  if (!(s > s_floor)) s = s_floor;
  if (!(a > 0.0) || !std::isfinite(a)) a = curve.efficiencies.front();

  DecayFit fit;
  double current = cost(curve, a, s);
  int it = 0;
  for (; it < 100; ++it) {
    // Gauss-Newton normal equations for residual r_i = eta_i - a e^(-s t^2).
    double jaa = 0.0, jas = 0.0, jss = 0.0, ga = 0.0, gs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t2 = curve.delays[i] * curve.delays[i];
      const double e = std::exp(-s * t2);
      const double r = curve.efficiencies[i] - a * e;
      const double da = -e;        // d r / d a
      const double ds = a * t2 * e;  // d r / d s
      jaa += da * da;
      jas += da * ds;
      jss += ds * ds;
      ga += da * r;
      gs += ds * r;
    }
    const double jdet = jaa * jss - jas * jas;
    if (!(std::abs(jdet) > 1e-300)) break;
    double step_a = -(jss * ga - jas * gs) / jdet;
    double step_s = -(jaa * gs - jas * ga) / jdet;

    double scale = 1.0;
    double next_a = a, next_s = s, next_cost = current;
    bool improved = false;
    for (int halves = 0; halves < 40; ++halves) {
      const double ta = a + scale * step_a;
      const double ts = s + scale * step_s;
      if (ta > 0.0 && std::isfinite(ta) && std::isfinite(ts)) {
        const double c = cost(curve, ta, ts);
        if (c <= current) {
          next_a = ta;
          next_s = ts;
          next_cost = c;
          improved = true;
          break;
        }
      }
      scale *= 0.5;
    }
    if (!improved) break;
    const double move = std::abs(next_a - a) / (1.0 + std::abs(a)) +
                        std::abs(next_s - s) / (1.0 + std::abs(s));
    a = next_a;
    s = next_s;
    current = next_cost;
    if (move < 1e-12) break;
  }
  if (it >= 100) {
    throw NumericError(
        "fit_gaussian_decay: no convergence in 100 iterations (a = " +
        std::to_string(a) + ", s = " + std::to_string(s) +
        ", cost = " + std::to_string(current) + ")");
  }

  if (!(s > s_floor)) {
    // No resolvable decay inside the window; pin tau and refit the amplitude.
    fit.ill_conditioned = true;
    s = s_floor;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-s * curve.delays[i] * curve.delays[i]);
      num += curve.efficiencies[i] * e;
      den += e * e;
    }
    a = num / den;
    current = cost(curve, a, s);
  }

  fit.eta0 = a;
  fit.tau = 1.0 / std::sqrt(s);
  fit.rms_residual = std::sqrt(current / static_cast<double>(n));
  fit.iterations = it;
  return fit;
}

EfficiencyBudget efficiency_budget(const DetectionChain& chain) {
  chain.validate();
  EfficiencyBudget budget;
  budget.eta_hd = chain.eta_hd;
  budget.eta_mode = chain.eta_m * chain.eta_m;
  budget.eta_q = chain.eta_q;
  budget.eta_det = chain.eta_det();
  return budget;
}

}  // namespace qhot
