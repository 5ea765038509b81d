#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qhot/errors.hpp"
#include "qhot/physics.hpp"
#include "qhot/rng.hpp"

using qhot::AtomParams;
using qhot::CavityParams;
using qhot::DecayCurve;
using qhot::DecayFit;
using qhot::cooperativity;
using qhot::doppler_time;
using qhot::eta_max;
using qhot::fit_gaussian_decay;

TEST_CASE("cooperativity and retrieval bound") {
  CavityParams params;
  params.g = 1.0;
  params.kappa = 2.0;
  params.gamma = 0.05;
  params.n_atoms = 1.5;
  CHECK(cooperativity(params) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(eta_max(15.0) == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(eta_max(0.0) == 0.0);

  params.kappa = 0.0;
  CHECK_THROWS_AS(cooperativity(params), std::invalid_argument);
  CHECK_THROWS_AS(eta_max(-1.0), std::invalid_argument);
}

TEST_CASE("thermal dephasing time for cold rubidium") {
  AtomParams atoms;
  atoms.temperature = 50e-6;
  atoms.wavelength = 795e-9;
  const double tau = doppler_time(atoms);
  CHECK(tau == doctest::Approx(915e-9).epsilon(2e-3));

  // independent check: monte carlo dephasing contrast of e^{i 2 k v t} for a
  // thermal 1d velocity distribution, |<e^{i 2 k v t}>|^2 = e^{-(t/tau)^2}
  const double mass = atoms.mass_amu * qhot::kAtomicMassUnit;
  const double v_sigma =
      std::sqrt(qhot::kBoltzmann * atoms.temperature / mass);
  const double k = 2.0 * std::numbers::pi / atoms.wavelength;
  qhot::Rng rng(271828);
  const int n = 400000;
  for (double t : {0.5 * tau, tau}) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = rng.normal(0.0, v_sigma);
      acc += std::exp(std::complex<double>(0.0, 2.0 * k * v * t));
    }
    acc /= static_cast<double>(n);
    const double contrast = std::norm(acc);
    const double expected = std::exp(-(t / tau) * (t / tau));
    CHECK(std::abs(contrast - expected) < 0.01);
  }

  CHECK(qhot::doppler_envelope(tau, atoms) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  atoms.temperature = 0.0;
  CHECK_THROWS_AS(doppler_time(atoms), std::invalid_argument);
}

TEST_CASE("gaussian decay fit recovers exact parameters") {
  const double eta0 = 0.37;
  const double tau = 900e-9;
  DecayCurve curve;
  for (int i = 0; i <= 8; ++i) {
    const double t = 200e-9 * i;
    curve.delays.push_back(t);
    curve.efficiencies.push_back(eta0 * std::exp(-(t / tau) * (t / tau)));
  }
  const DecayFit fit = fit_gaussian_decay(curve);
  CHECK_FALSE(fit.ill_conditioned);
  CHECK(fit.eta0 == doctest::Approx(eta0).epsilon(1e-8));
  CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-8));
  CHECK(fit.rms_residual < 1e-10);
}

TEST_CASE("gaussian decay fit tolerates measurement noise") {
  const double eta0 = 0.37;
  const double tau = 900e-9;
  qhot::Rng rng(12);
  DecayCurve curve;
  for (int i = 0; i <= 8; ++i) {
    const double t = 200e-9 * i;
    curve.delays.push_back(t);
    const double clean = eta0 * std::exp(-(t / tau) * (t / tau));
    curve.efficiencies.push_back(
        std::min(1.0, std::max(1e-4, clean + rng.normal(0.0, 0.01))));
  }
  const DecayFit fit = fit_gaussian_decay(curve);
  CHECK_FALSE(fit.ill_conditioned);
  CHECK(fit.eta0 == doctest::Approx(eta0).epsilon(0.15));
  CHECK(fit.tau == doctest::Approx(tau).epsilon(0.15));
}

TEST_CASE("flat decay curves are flagged instead of extrapolated") {
  DecayCurve curve;
  for (int i = 0; i <= 5; ++i) {
    curve.delays.push_back(100e-9 * i);
    curve.efficiencies.push_back(0.25);
  }
  const DecayFit fit = fit_gaussian_decay(curve);
  CHECK(fit.ill_conditioned);
  CHECK(fit.tau == doctest::Approx(10.0 * 500e-9).epsilon(1e-9));
  CHECK(fit.eta0 == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("decay curve validation") {
  DecayCurve curve;
  curve.delays = {0.0, 1.0};
  curve.efficiencies = {0.5, 0.4};
  CHECK_THROWS_AS(curve.validate(), std::invalid_argument);  // too short

  curve.delays = {0.0, 1.0, 0.5};
  curve.efficiencies = {0.5, 0.4, 0.3};
  CHECK_THROWS_AS(curve.validate(), std::invalid_argument);  // not increasing

  curve.delays = {0.0, 1.0, 2.0};
  curve.efficiencies = {0.5, 0.4, 0.0};
  CHECK_THROWS_AS(curve.validate(), std::invalid_argument);  // out of range

  curve.efficiencies = {0.5, 0.4, 0.3};
  curve.validate();
}

TEST_CASE("efficiency budget multiplies the chain factors") {
  qhot::DetectionChain chain;
  chain.eta_hd = 0.82;
  chain.eta_m = 0.965;
  chain.eta_q = 0.91;
  const auto budget = qhot::efficiency_budget(chain);
  CHECK(budget.eta_hd == 0.82);
  CHECK(budget.eta_mode == doctest::Approx(0.931225).epsilon(1e-12));
  CHECK(budget.eta_q == 0.91);
  CHECK(budget.eta_det == doctest::Approx(0.82 * 0.931225 * 0.91).epsilon(1e-12));
  CHECK(budget.eta_det == doctest::Approx(0.69488).epsilon(1e-4));
}
