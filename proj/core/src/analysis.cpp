#include "polcomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polcomp/error.hpp"

namespace polcomp {

namespace {

// Nearest bin index, rounding half away from zero.
std::int64_t bin_of(std::int64_t dt, std::int64_t width) {
  const std::int64_t half = width / 2;
  if (dt >= 0) return (dt + half) / width;
  return -((-dt + half) / width);
}

}  // namespace

nlohmann::json to_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}};
}

std::int64_t CorrelationHistogram::total() const {
  std::int64_t s = 0;
  for (std::int64_t c : counts) s += c;
  return s;
}

CorrelationHistogram& CorrelationHistogram::merge(
    const CorrelationHistogram& other) {
  if (other.bin_width_ps != bin_width_ps || other.first_bin != first_bin ||
      other.counts.size() != counts.size())
    throw InvalidArgument("CorrelationHistogram::merge: binning differs");
  for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += other.counts[j];
  return *this;
}

std::string CorrelationHistogram::to_csv() const {
  std::ostringstream os;
  os << "offset_ps,count\n";
  for (std::size_t j = 0; j < counts.size(); ++j)
    os << offset_ps(j) << ',' << counts[j] << '\n';
  return os.str();
}

nlohmann::json CorrelationHistogram::to_json() const {
  return {{"bin_width_ps", bin_width_ps},
          {"first_offset_ps", offset_ps(0)},
          {"counts", counts}};
}

CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b,
                                     std::int64_t bin_width_ps,
                                     std::int64_t max_offset_ps) {
  if (a.tags.empty() || b.tags.empty())
    throw InvalidArgument("cross_correlate: empty tag stream");
  if (bin_width_ps <= 0)
    throw InvalidArgument("cross_correlate: bin width must be positive");
  if (max_offset_ps < 0)
    throw InvalidArgument("cross_correlate: negative offset range");

  const std::int64_t m = bin_of(max_offset_ps, bin_width_ps);
  CorrelationHistogram h;
  h.bin_width_ps = bin_width_ps;
  h.first_bin = -m;
  h.counts.assign(static_cast<std::size_t>(2 * m + 1), 0);

  std::size_t lo = 0;
  for (const TimeTag& ta : a.tags) {
    while (lo < b.tags.size() && b.tags[lo].t_ps < ta.t_ps - max_offset_ps) ++lo;
    for (std::size_t j = lo; j < b.tags.size(); ++j) {
      const std::int64_t dt = b.tags[j].t_ps - ta.t_ps;
      if (dt > max_offset_ps) break;
      const std::int64_t k = bin_of(dt, bin_width_ps);
      if (k < -m || k > m) continue;
      ++h.counts[static_cast<std::size_t>(k + m)];
    }
  }
  return h;
}

DelayEstimate find_delay(const CorrelationHistogram& h, double min_confidence) {
  if (h.counts.empty()) throw InvalidArgument("find_delay: empty histogram");
  const std::size_t n = h.counts.size();

  std::size_t peak = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const auto c = h.counts[j];
    const auto best = h.counts[peak];
    if (c > best ||
        (c == best && std::llabs(h.offset_ps(j)) < std::llabs(h.offset_ps(peak))))
      peak = j;
  }

  const std::size_t lo = peak >= 2 ? peak - 2 : 0;
  const std::size_t hi = std::min(n - 1, peak + 2);
  double mass = 0.0, moment = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    mass += static_cast<double>(h.counts[j]);
    moment += static_cast<double>(h.counts[j]) * static_cast<double>(h.offset_ps(j));
  }

  double background = 0.0;
  const std::size_t outside = n - (hi - lo + 1);
  if (outside > 0)
    background = static_cast<double>(h.total() - static_cast<std::int64_t>(mass)) /
                 static_cast<double>(outside);

  DelayEstimate d;
  d.peak_count = h.counts[peak];
  d.offset_ps = mass > 0.0 ? moment / mass : static_cast<double>(h.offset_ps(peak));
  d.confidence = static_cast<double>(d.peak_count) / std::max(background, 1.0);
  if (d.confidence < min_confidence) throw DelayNotFound(d.confidence, min_confidence);
  return d;
}

CoincidenceTally& CoincidenceTally::operator+=(const CoincidenceTally& o) {
  same_hv += o.same_hv;
  diff_hv += o.diff_hv;
  same_da += o.same_da;
  diff_da += o.diff_da;
  return *this;
}

nlohmann::json CoincidenceTally::to_json() const {
  return {{"same_hv", same_hv},
          {"diff_hv", diff_hv},
          {"same_da", same_da},
          {"diff_da", diff_da}};
}

std::string CoincidenceTally::to_csv() const {
  std::ostringstream os;
  os << "same_hv,diff_hv,same_da,diff_da\n"
     << same_hv << ',' << diff_hv << ',' << same_da << ',' << diff_da << '\n';
  return os.str();
}

CoincidenceTally count_coincidences(const TagStream& a, const TagStream& b,
                                    std::int64_t delay_ps,
                                    std::int64_t window_ps,
                                    const BasisSchedule& schedule) {
  const std::int64_t half = std::max<std::int64_t>(window_ps, 1) / 2;
  std::vector<bool> used(b.tags.size(), false);
  CoincidenceTally t;

  std::size_t lo = 0;
  for (const TimeTag& ta : a.tags) {
    const std::int64_t centre = ta.t_ps + delay_ps;
    while (lo < b.tags.size() && b.tags[lo].t_ps < centre - half) ++lo;

    std::size_t best = b.tags.size();
    std::int64_t best_gap = 0;
    for (std::size_t j = lo; j < b.tags.size(); ++j) {
      const std::int64_t gap = b.tags[j].t_ps - centre;
      if (gap > half) break;
      if (used[j]) continue;
      if (best == b.tags.size() || std::llabs(gap) < best_gap) {
        best = j;
        best_gap = std::llabs(gap);
      }
    }
    if (best == b.tags.size()) continue;

    const auto basis = schedule.at(ta.t_ps);
    if (!basis) continue;
    used[best] = true;
    const bool same = ta.detector == b.tags[best].detector;
    if (*basis == BasisLabel::HV)
      ++(same ? t.same_hv : t.diff_hv);
    else
      ++(same ? t.same_da : t.diff_da);
  }
  return t;
}

Estimate qber(const CoincidenceTally& t) {
  const std::int64_t n = t.total();
  if (n <= 0) throw InvalidArgument("qber: no coincidences");
  const double q = static_cast<double>(t.diff_hv + t.diff_da) / static_cast<double>(n);
  return {q, std::sqrt(q * (1.0 - q) / static_cast<double>(n))};
}

Estimate visibility(double n_max, double n_min) {
  if (!(n_max >= 0.0 && n_min >= 0.0))
    throw InvalidArgument("visibility: counts must be non-negative");
  const double s = n_max + n_min;
  if (!(s > 0.0)) throw InvalidArgument("visibility: no counts");
  return {(n_max - n_min) / s, 2.0 * std::sqrt(n_max * n_min / (s * s * s))};
}

double qber_contribution(double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw InvalidArgument("qber_contribution: visibility must lie in [0, 1]");
  return (1.0 - v) / 2.0;
}

double fidelity_from_qber(double q) {
  if (!(q >= 0.0 && q <= 0.5))
    throw InvalidArgument("fidelity_from_qber: QBER must lie in [0, 0.5]");
  return 1.0 - 2.0 * q;
}

double estimated_fidelity(double pol_contribution, double baseline_other) {
  if (!(pol_contribution >= 0.0 && pol_contribution <= 0.5) ||
      !(baseline_other >= 0.0 && baseline_other <= 0.5))
    throw InvalidArgument("estimated_fidelity: inputs must lie in [0, 0.5]");
  return fidelity_from_qber(std::min(baseline_other + pol_contribution, 0.5));
}

bool key_rate_positive(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw InvalidArgument("key_rate_positive: QBER must lie in [0, 1]");
  return q < kKeyRateQberLimit;
}

double expected_qber(const TwoQubitState& rho) {
  const auto hv = outcome_probs(rho, MeasBasis::hv(), MeasBasis::hv());
  const auto da = outcome_probs(rho, MeasBasis::da(), MeasBasis::da());
  return 0.5 * (hv[1] + hv[2]) + 0.5 * (da[1] + da[2]);
}

}  // namespace polcomp
