#include "qhot/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "qhot/errors.hpp"
#include "qhot/rng.hpp"

namespace qhot {

namespace {

constexpr std::uint64_t kSaltG2Bootstrap = 0x6732626f6f747374ULL;

}  // namespace

void ClickRecord::validate() const {
  if (n2 < 0 || n3 < 0) {
    throw std::invalid_argument("ClickRecord: negative count");
  }
  if (times2.size() != static_cast<std::size_t>(n2) ||
      times3.size() != static_cast<std::size_t>(n3)) {
    throw std::invalid_argument("ClickRecord: times do not match counts");
  }
}

std::int64_t ArrivalHistogram::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts) sum += c;
  return sum;
}

void ArrivalHistogram::add(std::int32_t bin) {
  if (counts.empty()) {
    first_bin = bin;
    counts.push_back(1);
    return;
  }
  if (bin < first_bin) {
    counts.insert(counts.begin(), static_cast<std::size_t>(first_bin - bin), 0);
    first_bin = bin;
  } else if (bin >= first_bin + static_cast<std::int32_t>(counts.size())) {
    counts.resize(static_cast<std::size_t>(bin - first_bin) + 1, 0);
  }
  ++counts[static_cast<std::size_t>(bin - first_bin)];
}

void ArrivalHistogram::merge(const ArrivalHistogram& other) {
  for (std::size_t k = 0; k < other.counts.size(); ++k) {
    if (other.counts[k] == 0) continue;
    const std::int32_t bin = other.first_bin + static_cast<std::int32_t>(k);
    if (counts.empty()) {
      first_bin = bin;
      counts.push_back(other.counts[k]);
      continue;
    }
    if (bin < first_bin) {
      counts.insert(counts.begin(), static_cast<std::size_t>(first_bin - bin),
                    0);
      first_bin = bin;
    } else if (bin >= first_bin + static_cast<std::int32_t>(counts.size())) {
      counts.resize(static_cast<std::size_t>(bin - first_bin) + 1, 0);
    }
    counts[static_cast<std::size_t>(bin - first_bin)] += other.counts[k];
  }
}

ArrivalHistogram arrival_histogram(std::span<const ClickRecord> records,
                                   DetectorSelect which) {
  ArrivalHistogram hist;
  for (const ClickRecord& rec : records) {
    rec.validate();
    if (which == DetectorSelect::spcm2 || which == DetectorSelect::both) {
      for (std::int32_t bin : rec.times2) hist.add(bin);
    }
    if (which == DetectorSelect::spcm3 || which == DetectorSelect::both) {
      for (std::int32_t bin : rec.times3) hist.add(bin);
    }
  }
  return hist;
}

namespace {

struct PairMoments {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_ab = 0.0;
};

double g2_of(const PairMoments& m) { return m.mean_ab / (m.mean_a * m.mean_b); }

}  // namespace

G2Estimate g2_from_counts(std::span<const std::uint8_t> n2,
                          std::span<const std::uint8_t> n3, int tau,
                          int n_bootstrap, std::uint64_t seed) {
  if (n2.size() != n3.size()) {
    throw std::invalid_argument("g2_from_counts: count vectors differ in size");
  }
  if (n_bootstrap < 0) {
    throw std::invalid_argument("g2_from_counts: n_bootstrap must be >= 0");
  }
  const std::int64_t trials = static_cast<std::int64_t>(n2.size());
  if (trials < 2) {
    throw std::invalid_argument("g2_from_counts: need at least 2 trials");
  }
  const std::int64_t lo = tau < 0 ? -static_cast<std::int64_t>(tau) : 0;
  const std::int64_t hi = trials - (tau > 0 ? tau : 0);
  if (hi - lo < 1) {
    throw std::invalid_argument("g2_from_counts: no valid pairs at this tau");
  }

  // Tally the joint (n2_i, n3_{i+tau}) pair counts; all pair statistics and
  // every bootstrap resample reduce to this table.
  std::map<std::pair<int, int>, std::int64_t> table;
  for (std::int64_t i = lo; i < hi; ++i) {
    ++table[{static_cast<int>(n2[static_cast<std::size_t>(i)]),
             static_cast<int>(n3[static_cast<std::size_t>(i + tau)])}];
  }
  const std::int64_t pairs = hi - lo;

  const auto moments = [pairs](std::span<const std::pair<int, int>> keys,
                               std::span<const std::int64_t> freq) {
    PairMoments m;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const double w = static_cast<double>(freq[k]);
      m.mean_a += w * keys[k].first;
      m.mean_b += w * keys[k].second;
      m.mean_ab += w * keys[k].first * keys[k].second;
    }
    const double inv = 1.0 / static_cast<double>(pairs);
    m.mean_a *= inv;
    m.mean_b *= inv;
    m.mean_ab *= inv;
    return m;
  };

  std::vector<std::pair<int, int>> keys;
  std::vector<std::int64_t> freq;
  keys.reserve(table.size());
  freq.reserve(table.size());
  for (const auto& [key, count] : table) {
    keys.push_back(key);
    freq.push_back(count);
  }

  const PairMoments point = moments(keys, freq);
  if (point.mean_a <= 0.0 || point.mean_b <= 0.0) {
    throw NumericError(
        "g2_from_counts: a detector registered no clicks, g2 is undefined");
  }

  G2Estimate est;
  est.tau = tau;
  est.value = g2_of(point);
  est.stderr_value = std::numeric_limits<double>::quiet_NaN();
  if (n_bootstrap == 0) return est;

  // Bootstrap over pairs: resample the pair table with a multinomial draw
  // (sequential binomial splits), recompute g2, and take the spread.
  Rng rng = Rng::for_stream(seed ^ kSaltG2Bootstrap, 0);
  std::vector<std::int64_t> resampled(freq.size());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_bootstrap));
  for (int b = 0; b < n_bootstrap; ++b) {
    std::int64_t remaining = pairs;
    double mass_left = 1.0;
    for (std::size_t k = 0; k < freq.size(); ++k) {
      const double p = static_cast<double>(freq[k]) /
                       static_cast<double>(pairs);
      double cond = mass_left > 0.0 ? p / mass_left : 1.0;
      cond = std::clamp(cond, 0.0, 1.0);
      const std::int64_t draw =
          (k + 1 == freq.size()) ? remaining : rng.binomial(remaining, cond);
      resampled[k] = draw;
      remaining -= draw;
      mass_left -= p;
    }
    const PairMoments m = moments(keys, resampled);
    if (m.mean_a > 0.0 && m.mean_b > 0.0) values.push_back(g2_of(m));
  }
  if (values.size() >= 2) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    est.stderr_value =
        std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return est;
}

G2Estimate g2_from_counts(std::span<const ClickRecord> records, int tau,
                          int n_bootstrap, std::uint64_t seed) {
  std::vector<std::uint8_t> n2(records.size());
  std::vector<std::uint8_t> n3(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].validate();
    if (records[i].n2 > 255 || records[i].n3 > 255) {
      throw std::invalid_argument("g2_from_counts: count exceeds 255");
    }
    n2[i] = static_cast<std::uint8_t>(records[i].n2);
    n3[i] = static_cast<std::uint8_t>(records[i].n3);
  }
  return g2_from_counts(std::span<const std::uint8_t>(n2),
                        std::span<const std::uint8_t>(n3), tau, n_bootstrap,
                        seed);
}

double g2_theory(const DiagonalState& state) {
  const auto& p = state.populations();
  double nbar = 0.0;
  double pairs = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double dn = static_cast<double>(n);
    nbar += dn * p[n];
    pairs += dn * (dn - 1.0) * p[n];
  }
  if (nbar <= 0.0) {
    throw NumericError("g2_theory: mean photon number is zero");
  }
  return pairs / (nbar * nbar);
}

}  // namespace qhot
