#pragma once

// Estimators over detection data: cross-correlation histograms, delay
// finding, coincidence tallies, QBER, visibility and derived figures.

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polcomp/photostream.hpp"
#include "polcomp/polmath.hpp"

namespace polcomp {

inline constexpr std::int64_t kDefaultBinWidthPs = 50;
inline constexpr std::int64_t kDefaultWindowPs = 500;
inline constexpr std::int64_t kDefaultMaxOffsetPs = 10'000'000;
inline constexpr double kDefaultMinConfidence = 5.0;
/// QBER below this bound still allows a positive secret key rate.
inline constexpr double kKeyRateQberLimit = 0.11;
/// Non-polarization QBER budget: 3.35 % total minus the 0.91 % share of the
/// manually compensated network.
inline constexpr double kBaselineOtherQber = 0.0335 - 0.0091;

/// A value with its one-sigma standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

nlohmann::json to_json(const Estimate& e);

/// Bin j is centred on offset (first_bin + j) * bin_width_ps.
struct CorrelationHistogram {
  std::int64_t bin_width_ps = kDefaultBinWidthPs;
  std::int64_t first_bin = 0;
  std::vector<std::int64_t> counts;

  std::int64_t offset_ps(std::size_t j) const {
    return (first_bin + static_cast<std::int64_t>(j)) * bin_width_ps;
  }
  std::int64_t total() const;

  /// Bin-wise sum; both histograms must share the same binning.
  CorrelationHistogram& merge(const CorrelationHistogram& other);

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Histogram of t_b - t_a over |offset| <= max_offset_ps.  Offsets are
/// rounded half away from zero onto the bin grid, so swapping the streams
/// mirrors the histogram exactly.
CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b,
                                     std::int64_t bin_width_ps,
                                     std::int64_t max_offset_ps);

struct DelayEstimate {
  double offset_ps = 0.0;
  double confidence = 0.0;
  std::int64_t peak_count = 0;
};

/// Peak bin refined by the centroid of the five bins around it.  Confidence
/// is the peak over the mean of the remaining bins, the latter floored at
/// one count.  Throws DelayNotFound below `min_confidence`.
DelayEstimate find_delay(const CorrelationHistogram& h,
                         double min_confidence = kDefaultMinConfidence);

struct CoincidenceTally {
  std::int64_t same_hv = 0;
  std::int64_t diff_hv = 0;
  std::int64_t same_da = 0;
  std::int64_t diff_da = 0;

  std::int64_t total() const { return same_hv + diff_hv + same_da + diff_da; }
  CoincidenceTally& operator+=(const CoincidenceTally& o);
  nlohmann::json to_json() const;
  std::string to_csv() const;

  friend bool operator==(const CoincidenceTally&,
                         const CoincidenceTally&) = default;
};

/// Greedy nearest-neighbour pairing: each tag of `a`, in time order, takes
/// the closest unused tag of `b` with |t_b - t_a - delay| <= window / 2.
/// The basis comes from `schedule` at t_a; unscheduled tags are skipped.
/// Windows below 1 ps are raised to 1 ps.
CoincidenceTally count_coincidences(const TagStream& a, const TagStream& b,
                                    std::int64_t delay_ps,
                                    std::int64_t window_ps,
                                    const BasisSchedule& schedule);

/// Wrong-port fraction over both bases, with the binomial standard error.
Estimate qber(const CoincidenceTally& t);

/// (n_max - n_min) / (n_max + n_min) with Poisson-propagated error.
Estimate visibility(double n_max, double n_min);

double qber_contribution(double v);

/// 1 - 2q, the reporting convention for entanglement fidelity.
double fidelity_from_qber(double q);

double estimated_fidelity(double pol_contribution,
                          double baseline_other = kBaselineOtherQber);

bool key_rate_positive(double q);

/// Expected QBER of a state measured with both analysers aligned, the two
/// bases weighted equally.
double expected_qber(const TwoQubitState& rho);

}  // namespace polcomp
