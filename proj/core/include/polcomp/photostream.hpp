#pragma once

// Monte Carlo detection events: pair emission, reference-laser photons,
// shutters and detectors with efficiency, timing jitter and dark counts.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polcomp/polmath.hpp"

namespace polcomp {

inline constexpr double kDefaultPairRateHz = 1e5;
inline constexpr double kDefaultDarkRateHz = 100.0;
/// Shutter transition time; sets the cross-basis leakage of blinking mode.
inline constexpr double kShutterTransitionS = 6e-3;

constexpr std::int64_t seconds_to_ps(double s) noexcept {
  return static_cast<std::int64_t>(s * 1e12 + 0.5);
}

struct SourceModel {
  double pair_rate_hz = kDefaultPairRateHz;
  double werner_p = 0.933;

  void validate() const;
};

struct DetectorModel {
  double efficiency = 0.8;
  double jitter_sigma_ps = 70.0;
  double dark_rate_hz = kDefaultDarkRateHz;

  void validate() const;
};

/// One click.  `detector` indexes TagStream::detectors.
struct TimeTag {
  std::int64_t t_ps = 0;
  std::uint8_t detector = 0;

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

struct TagStream {
  std::vector<TimeTag> tags;
  std::int64_t duration_ps = 0;
  /// Detector names; the two analyser outputs by default.
  std::vector<std::string> detectors{"D1", "D2"};

  /// Checks ordering, range and detector indices.
  void validate() const;

  friend bool operator==(const TagStream&, const TagStream&) = default;
};

enum class ShutterMode { open, closed, blinking };

/// Blinking shutters alternate between the two reference bases every half
/// period; `transition_ps` is how long both arms are partly open.
struct ShutterSchedule {
  ShutterMode mode = ShutterMode::open;
  std::int64_t period_ps = 0;
  std::int64_t phase_ps = 0;
  std::int64_t transition_ps = 0;

  static ShutterSchedule blinking(double integration_s,
                                  double transition_s = kShutterTransitionS);

  void validate() const;
  /// For blinking shutters, true during the first half period.
  bool is_open(std::int64_t t_ps) const;
  /// Fraction of each integration window leaking from the other basis.
  double sync_error() const;
};

/// tau / T_int, the leakage of a blinking window of length T_int.
double sync_error_from_transition(double transition_s, double integration_s);

/// Emission of one photon pair.  `latent` is the uniform variate that later
/// selects the joint outcome, so that the same emissions can be analysed
/// under different states and bases.
struct PairEvent {
  std::int64_t t_ps = 0;
  double latent = 0.0;
};

/// Homogeneous Poisson emission on [0, duration_s).
std::vector<PairEvent> generate_pairs(const SourceModel& src, double duration_s,
                                      std::uint64_t seed);

/// Everything between the pair source and one user's time tagger.
struct Arm {
  DetectorModel detector;
  double transmission = 1.0;  // fibre and optics, detector excluded
  std::int64_t offset_ps = 0; // propagation delay
};

struct StreamPair {
  TagStream a;
  TagStream b;
};

/// One joint outcome per pair drawn from outcome_probs, then each photon
/// thinned independently by transmission and efficiency, jittered, and
/// merged with Poisson dark counts on every detector.  Tags outside
/// [0, duration_ps] are dropped.
StreamPair detect_pair_events(std::span<const PairEvent> events,
                              const TwoQubitState& rho, const MeasBasis& basisA,
                              const MeasBasis& basisB, const Arm& armA,
                              const Arm& armB, std::int64_t duration_ps,
                              std::uint64_t seed);

/// Basis that both analysers were set to over a time interval of user A's
/// clock.
struct BasisInterval {
  std::int64_t begin_ps = 0;
  std::int64_t end_ps = 0;
  BasisLabel basis = BasisLabel::HV;
};

struct BasisSchedule {
  std::vector<BasisInterval> intervals;

  static BasisSchedule constant(BasisLabel b, std::int64_t duration_ps);
  std::optional<BasisLabel> at(std::int64_t t_ps) const;
};

struct Acquisition {
  StreamPair streams;
  BasisSchedule schedule;
  std::int64_t emitted = 0;
};

/// `duration_s` of entangled-pair streams: the first half with both
/// analysers in HV, the second half in DA.
Acquisition acquire_two_basis(const SourceModel& src, const TwoQubitState& rho,
                              const Arm& armA, const Arm& armB,
                              double duration_s, std::uint64_t seed);

/// Attenuated reference laser: independent Poisson counts with means
/// mean_photons * single_arm_probs.
std::array<std::int64_t, 2> reference_counts(const JonesState& input,
                                             const Unitary2& u,
                                             const MeasBasis& basis,
                                             double mean_photons,
                                             std::uint64_t seed);

struct BlinkingCounts {
  std::array<std::int64_t, 2> hv{};  // H sent, analysed in HV
  std::array<std::int64_t, 2> da{};  // D sent, analysed in DA
};

/// Port probabilities seen in one blinking window: a fraction `sync_error`
/// of the light belongs to the other basis's reference state.
std::array<double, 2> blinking_port_probs(const Unitary2& u, BasisLabel window,
                                          double sync_error);

BlinkingCounts blinking_counts(const Unitary2& u, double integration_s,
                               double mean_rate, double sync_error,
                               std::uint64_t seed);

/// Poisson draw that accepts a zero mean.
std::int64_t poisson(Rng& rng, double mean);

}  // namespace polcomp
