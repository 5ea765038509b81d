#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qhot/counting.hpp"
#include "qhot/errors.hpp"
#include "qhot/sampler.hpp"
#include "qhot/temporal.hpp"
#include "test_utils.hpp"

using qhot::ArrivalHistogram;
using qhot::ClickRecord;
using qhot::DetectionChain;
using qhot::DiagonalState;
using qhot::g2_from_counts;
using qhot::g2_theory;

namespace {

const qhot::TimeGrid kGrid{};
constexpr double kSigma = 5.656854249492380e-8;

qhot::SourceModel click_source() {
  return {DiagonalState({0.423, 0.57, 0.007}),
          qhot::gaussian_mode(kGrid, 1.0e-6, kSigma), 1e-3};
}

DetectionChain counting_chain() {
  DetectionChain chain;
  chain.eta_c = 0.37;
  return chain;
}

}  // namespace

TEST_CASE("g2_theory closed forms") {
  CHECK(g2_theory(DiagonalState::fock(1, 3)) == 0.0);
  CHECK(g2_theory(DiagonalState::fock(2, 3)) == doctest::Approx(0.5).epsilon(1e-12));

  // two-photon admixture: g2 = 2 p2 / (p1 + 2 p2)^2
  const DiagonalState mixed({0.423, 0.57, 0.007});
  const double nbar = 0.57 + 2.0 * 0.007;
  CHECK(g2_theory(mixed) ==
        doctest::Approx(2.0 * 0.007 / (nbar * nbar)).epsilon(1e-12));

  // a poisson source is uncorrelated up to truncation
  CHECK(g2_theory(DiagonalState::truncated_poisson(0.05, 10)) ==
        doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(g2_theory(DiagonalState::vacuum(3)), qhot::NumericError);
}

TEST_CASE("g2_theory is invariant under binomial loss") {
  const DiagonalState s({0.3, 0.55, 0.12, 0.03});
  const double bare = g2_theory(s);
  for (double eta : {0.9, 0.5, 0.37, 0.08}) {
    CHECK(g2_theory(qhot::apply_loss(s, eta)) ==
          doctest::Approx(bare).epsilon(1e-12));
  }
}

TEST_CASE("g2 estimate on synthetic counts shows antibunching at zero delay") {
  const auto stats =
      qhot::sample_click_stats(click_source(), counting_chain(), 400000, 31415);
  const double expected = g2_theory(DiagonalState({0.423, 0.57, 0.007}));

  const auto zero = g2_from_counts(stats.n2, stats.n3, 0, 1000, 1);
  CHECK(zero.tau == 0);
  CHECK(zero.value >= 0.0);
  CHECK(zero.stderr_value > 0.0);
  CHECK(zero.stderr_value < 0.05);
  CHECK(std::abs(zero.value - expected) < 4.0 * zero.stderr_value);
  // far from unity: the same source with poisson statistics would sit at 1
  CHECK(zero.value < 0.3);

  for (int tau : {-2, 1, 3}) {
    const auto off = g2_from_counts(stats.n2, stats.n3, tau, 1000, 1);
    CHECK(off.tau == tau);
    CHECK(std::abs(off.value - 1.0) < 4.0 * off.stderr_value);
    CHECK(off.stderr_value < 0.2);
  }
}

TEST_CASE("g2 estimator validates its inputs") {
  std::vector<std::uint8_t> a = {1, 0, 2, 1};
  std::vector<std::uint8_t> b = {0, 1, 1};
  CHECK_THROWS_AS(g2_from_counts(a, b, 0, 0, 0), std::invalid_argument);

  b.push_back(0);
  CHECK_THROWS_AS(g2_from_counts(a, b, 4, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(g2_from_counts(a, b, 0, -1, 0), std::invalid_argument);

  const std::vector<std::uint8_t> silent(200, 0);
  CHECK_THROWS_AS(g2_from_counts(silent, silent, 0, 0, 0),
                  qhot::NumericError);

  // n_bootstrap = 0 skips the error estimate
  const auto est = g2_from_counts(a, b, 0, 0, 0);
  CHECK(std::isnan(est.stderr_value));
  CHECK(est.value ==
        doctest::Approx((0.0 + 0.0 + 2.0 + 0.0) / 4.0 /
                        ((4.0 / 4.0) * (2.0 / 4.0)))
            .epsilon(1e-12));
}

TEST_CASE("a pure single photon never coincides with itself") {
  const qhot::SourceModel source{DiagonalState::fock(1, 2),
                                 qhot::gaussian_mode(kGrid, 1.0e-6, kSigma),
                                 1e-3};
  DetectionChain chain;
  chain.eta_c = 0.8;
  const auto stats = qhot::sample_click_stats(source, chain, 50000, 17);
  const auto est = g2_from_counts(stats.n2, stats.n3, 0, 200, 17);
  CHECK(est.value == 0.0);
}

TEST_CASE("poissonian populations sit at the classical bound") {
  const qhot::SourceModel source{DiagonalState::truncated_poisson(0.1, 6),
                                 qhot::gaussian_mode(kGrid, 1.0e-6, kSigma),
                                 1e-3};
  DetectionChain chain;  // eta_c = 1
  const auto stats = qhot::sample_click_stats(source, chain, 2000000, 5150);
  const auto est = g2_from_counts(stats.n2, stats.n3, 0, 400, 2);
  CHECK(std::abs(est.value - 1.0) < 0.03);
  CHECK(std::abs(est.value - 1.0) < 4.0 * est.stderr_value);
}

TEST_CASE("the 50:50 split is symmetric between detectors") {
  const auto stats =
      qhot::sample_click_stats(click_source(), counting_chain(), 300000, 8888);
  // count histograms of the two detectors should be homogeneous
  std::vector<long long> h2(6, 0), h3(6, 0);
  for (std::size_t i = 0; i < stats.n2.size(); ++i) {
    ++h2[std::min<std::size_t>(stats.n2[i], 5)];
    ++h3[std::min<std::size_t>(stats.n3[i], 5)];
  }
  CHECK(testutil::chi2_homogeneity(h2, h3) > 1e-4);

  // swapping detector labels leaves the zero-delay estimate unchanged
  const auto fwd = g2_from_counts(stats.n2, stats.n3, 0, 0, 0);
  const auto rev = g2_from_counts(stats.n3, stats.n2, 0, 0, 0);
  CHECK(fwd.value == rev.value);
}

TEST_CASE("click record overload matches the count overload") {
  const auto records =
      qhot::sample_clicks(click_source(), counting_chain(), 5000, 999);
  std::vector<std::uint8_t> n2(records.size());
  std::vector<std::uint8_t> n3(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    n2[i] = static_cast<std::uint8_t>(records[i].n2);
    n3[i] = static_cast<std::uint8_t>(records[i].n3);
  }
  const auto a = g2_from_counts(records, 1, 50, 5);
  const auto b = g2_from_counts(n2, n3, 1, 50, 5);
  CHECK(a.value == b.value);
  CHECK(a.stderr_value == b.stderr_value);
}

TEST_CASE("arrival histogram bookkeeping") {
  ArrivalHistogram hist;
  hist.add(100);
  hist.add(98);
  hist.add(100);
  hist.add(103);
  CHECK(hist.first_bin == 98);
  REQUIRE(hist.counts.size() == 6);
  CHECK(hist.counts[0] == 1);
  CHECK(hist.counts[2] == 2);
  CHECK(hist.counts[5] == 1);
  CHECK(hist.total() == 4);

  ArrivalHistogram other;
  other.add(95);
  other.add(100);
  hist.merge(other);
  CHECK(hist.first_bin == 95);
  CHECK(hist.total() == 6);
  CHECK(hist.counts[5] == 3);

  ClickRecord rec;
  rec.trial_id = 1;
  rec.n2 = 2;
  rec.n3 = 1;
  rec.times2 = {10, 12};
  rec.times3 = {11};
  const std::vector<ClickRecord> records = {rec};
  const auto h2 = qhot::arrival_histogram(records, qhot::DetectorSelect::spcm2);
  CHECK(h2.total() == 2);
  const auto hb = qhot::arrival_histogram(records, qhot::DetectorSelect::both);
  CHECK(hb.total() == 3);
  CHECK(hb.first_bin == 10);

  ClickRecord bad;
  bad.n2 = 1;
  const std::vector<ClickRecord> bad_records = {bad};
  CHECK_THROWS_AS(qhot::arrival_histogram(bad_records,
                                          qhot::DetectorSelect::both),
                  std::invalid_argument);
}
