#include "polcomp/photostream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "polcomp/error.hpp"

namespace polcomp {

namespace {

// Cumulative joint-outcome table, in outcome_probs order.
std::array<double, 4> cumulative(const std::array<double, 4>& p) {
  std::array<double, 4> c{};
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += std::max(p[k], 0.0);
    c[k] = acc;
  }
  for (double& x : c) x /= acc;
  c[3] = 1.0;
  return c;
}

int pick(const std::array<double, 4>& cum, double u) {
  int k = 0;
  while (k < 3 && u >= cum[k]) ++k;
  return k;
}

struct Segment {
  std::int64_t end_ps;  // emissions before this time use `cum`
  std::array<double, 4> cum;
};

void add_dark_counts(TagStream& s, const DetectorModel& det, Rng& rng) {
  if (det.dark_rate_hz <= 0.0) return;
  const double mean = det.dark_rate_hz * static_cast<double>(s.duration_ps) * 1e-12;
  std::uniform_int_distribution<std::int64_t> when(0, s.duration_ps);
  for (std::uint8_t d = 0; d < s.detectors.size(); ++d) {
    const std::int64_t n = poisson(rng, mean);
    for (std::int64_t i = 0; i < n; ++i) s.tags.push_back({when(rng), d});
  }
}

void sort_tags(TagStream& s) {
  std::sort(s.tags.begin(), s.tags.end(), [](const TimeTag& x, const TimeTag& y) {
    return x.t_ps != y.t_ps ? x.t_ps < y.t_ps : x.detector < y.detector;
  });
}

StreamPair detect_segments(std::span<const PairEvent> events,
                           std::span<const Segment> segments, const Arm& armA,
                           const Arm& armB, std::int64_t duration_ps,
                           std::uint64_t seed) {
  armA.detector.validate();
  armB.detector.validate();
  if (!(armA.transmission > 0.0 && armA.transmission <= 1.0) ||
      !(armB.transmission > 0.0 && armB.transmission <= 1.0))
    throw InvalidArgument("detect_pair_events: transmission must be in (0, 1]");
  if (duration_ps <= 0)
    throw InvalidArgument("detect_pair_events: duration must be positive");

  Rng rng = make_rng(seed, 0x646574ULL);
  std::normal_distribution<double> jitter;
  const double keepA = armA.transmission * armA.detector.efficiency;
  const double keepB = armB.transmission * armB.detector.efficiency;

  StreamPair out;
  out.a.duration_ps = out.b.duration_ps = duration_ps;
  const double expected = static_cast<double>(events.size());
  out.a.tags.reserve(static_cast<std::size_t>(expected * keepA * 1.1) + 16);
  out.b.tags.reserve(static_cast<std::size_t>(expected * keepB * 1.1) + 16);

  auto emit = [&](TagStream& s, const Arm& arm, std::int64_t t,
                  std::uint8_t port) {
    std::int64_t when = t + arm.offset_ps;
    if (arm.detector.jitter_sigma_ps > 0.0)
      when += std::llround(jitter(rng) * arm.detector.jitter_sigma_ps);
    if (when >= 0 && when <= duration_ps) s.tags.push_back({when, port});
  };

  std::size_t seg = 0;
  for (const PairEvent& e : events) {
    while (seg + 1 < segments.size() && e.t_ps >= segments[seg].end_ps) ++seg;
    const int k = pick(segments[seg].cum, e.latent);
    const bool survA = uniform01(rng) < keepA;
    const bool survB = uniform01(rng) < keepB;
    if (survA) emit(out.a, armA, e.t_ps, static_cast<std::uint8_t>(k >> 1));
    if (survB) emit(out.b, armB, e.t_ps, static_cast<std::uint8_t>(k & 1));
  }

  add_dark_counts(out.a, armA.detector, rng);
  add_dark_counts(out.b, armB.detector, rng);
  sort_tags(out.a);
  sort_tags(out.b);
  return out;
}

}  // namespace

void SourceModel::validate() const {
  if (!(pair_rate_hz > 0.0))
    throw InvalidArgument("SourceModel: pair_rate_hz must be > 0");
  if (!(werner_p >= 0.0 && werner_p <= 1.0))
    throw InvalidArgument("SourceModel: werner_p must lie in [0, 1]");
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw InvalidArgument("DetectorModel: efficiency must be in (0, 1]");
  if (!(jitter_sigma_ps >= 0.0))
    throw InvalidArgument("DetectorModel: jitter must be >= 0");
  if (!(dark_rate_hz >= 0.0))
    throw InvalidArgument("DetectorModel: dark rate must be >= 0");
}

void TagStream::validate() const {
  if (duration_ps < 0) throw InvalidArgument("TagStream: negative duration");
  std::int64_t prev = 0;
  for (const TimeTag& t : tags) {
    if (t.t_ps < prev) throw InvalidArgument("TagStream: timestamps decrease");
    if (t.t_ps > duration_ps)
      throw InvalidArgument("TagStream: timestamp beyond duration");
    if (t.detector >= detectors.size())
      throw InvalidArgument("TagStream: unknown detector index");
    prev = t.t_ps;
  }
}

ShutterSchedule ShutterSchedule::blinking(double integration_s,
                                          double transition_s) {
  ShutterSchedule s;
  s.mode = ShutterMode::blinking;
  s.period_ps = 2 * seconds_to_ps(integration_s);
  s.transition_ps = seconds_to_ps(transition_s);
  s.validate();
  return s;
}

void ShutterSchedule::validate() const {
  if (mode != ShutterMode::blinking) return;
  if (period_ps <= 0)
    throw InvalidArgument("ShutterSchedule: blinking needs a positive period");
  if (transition_ps < 0 || transition_ps >= period_ps)
    throw InvalidArgument("ShutterSchedule: transition must be in [0, period)");
}

bool ShutterSchedule::is_open(std::int64_t t_ps) const {
  switch (mode) {
    case ShutterMode::open:
      return true;
    case ShutterMode::closed:
      return false;
    case ShutterMode::blinking:
      break;
  }
  std::int64_t r = (t_ps - phase_ps) % period_ps;
  if (r < 0) r += period_ps;
  return r < period_ps / 2;
}

double ShutterSchedule::sync_error() const {
  if (mode != ShutterMode::blinking) return 0.0;
  return static_cast<double>(transition_ps) /
         (static_cast<double>(period_ps) / 2.0);
}

double sync_error_from_transition(double transition_s, double integration_s) {
  if (!(integration_s > 0.0) || !(transition_s >= 0.0))
    throw InvalidArgument("sync_error_from_transition: invalid times");
  return transition_s / integration_s;
}

std::int64_t poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw InvalidArgument("poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::int64_t> d(mean);
  return d(rng);
}

std::vector<PairEvent> generate_pairs(const SourceModel& src, double duration_s,
                                      std::uint64_t seed) {
  src.validate();
  if (!(duration_s > 0.0))
    throw InvalidArgument("generate_pairs: duration must be positive");
  Rng rng = make_rng(seed, 0x7061697273ULL);
  const std::int64_t end = seconds_to_ps(duration_s);
  const double mean_gap_ps = 1e12 / src.pair_rate_hz;
  std::exponential_distribution<double> gap(1.0);

  std::vector<PairEvent> out;
  out.reserve(static_cast<std::size_t>(src.pair_rate_hz * duration_s * 1.05) + 16);
  double t = 0.0;
  for (;;) {
    t += gap(rng) * mean_gap_ps;
    const auto tp = static_cast<std::int64_t>(t);
    if (tp >= end) break;
    out.push_back({tp, uniform01(rng)});
  }
  return out;
}

StreamPair detect_pair_events(std::span<const PairEvent> events,
                              const TwoQubitState& rho, const MeasBasis& basisA,
                              const MeasBasis& basisB, const Arm& armA,
                              const Arm& armB, std::int64_t duration_ps,
                              std::uint64_t seed) {
  const Segment seg{std::numeric_limits<std::int64_t>::max(),
                    cumulative(outcome_probs(rho, basisA, basisB))};
  return detect_segments(events, std::span(&seg, 1), armA, armB, duration_ps,
                         seed);
}

BasisSchedule BasisSchedule::constant(BasisLabel b, std::int64_t duration_ps) {
  return {{{0, duration_ps, b}}};
}

std::optional<BasisLabel> BasisSchedule::at(std::int64_t t_ps) const {
  for (const BasisInterval& iv : intervals)
    if (t_ps >= iv.begin_ps && t_ps < iv.end_ps) return iv.basis;
  return std::nullopt;
}

Acquisition acquire_two_basis(const SourceModel& src, const TwoQubitState& rho,
                              const Arm& armA, const Arm& armB,
                              double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0))
    throw InvalidArgument("acquire_two_basis: window must be positive");
  const std::int64_t span = seconds_to_ps(duration_s);
  const std::int64_t half = span / 2;
  const MeasBasis hv = MeasBasis::hv();
  const MeasBasis da = MeasBasis::da();
  const Segment segs[2] = {{half, cumulative(outcome_probs(rho, hv, hv))},
                           {span, cumulative(outcome_probs(rho, da, da))}};

  const std::vector<PairEvent> events =
      generate_pairs(src, duration_s, derive_seed(seed, 1));
  // Leave room for the later arm plus a generous jitter tail.
  const std::int64_t duration =
      span + std::max(armA.offset_ps, armB.offset_ps) + 1'000'000;

  Acquisition acq;
  acq.streams = detect_segments(events, segs, armA, armB, duration,
                                derive_seed(seed, 2));
  acq.emitted = static_cast<std::int64_t>(events.size());
  acq.schedule.intervals = {
      {armA.offset_ps + 0, armA.offset_ps + half, BasisLabel::HV},
      {armA.offset_ps + half, armA.offset_ps + span, BasisLabel::DA}};
  return acq;
}

std::array<std::int64_t, 2> reference_counts(const JonesState& input,
                                             const Unitary2& u,
                                             const MeasBasis& basis,
                                             double mean_photons,
                                             std::uint64_t seed) {
  if (!(mean_photons > 0.0))
    throw InvalidArgument("reference_counts: mean photon number must be > 0");
  const auto p = single_arm_probs(input, u, basis);
  Rng rng = make_rng(seed, 0x726566ULL);
  return {poisson(rng, mean_photons * p[0]), poisson(rng, mean_photons * p[1])};
}

std::array<double, 2> blinking_port_probs(const Unitary2& u, BasisLabel window,
                                          double sync_error) {
  if (!(sync_error >= 0.0 && sync_error < 0.5))
    throw InvalidArgument("blinking: sync_error must be in [0, 0.5)");
  const MeasBasis analyser = MeasBasis::of(window);
  const MeasBasis leak = MeasBasis::of(other(window));
  const auto own = single_arm_probs(analyser.nominal(), u, analyser);
  const auto mixed = single_arm_probs(leak.nominal(), u, analyser);
  return {(1.0 - sync_error) * own[0] + sync_error * mixed[0],
          (1.0 - sync_error) * own[1] + sync_error * mixed[1]};
}

BlinkingCounts blinking_counts(const Unitary2& u, double integration_s,
                               double mean_rate, double sync_error,
                               std::uint64_t seed) {
  if (!(integration_s > 0.0) || !(mean_rate > 0.0))
    throw InvalidArgument("blinking_counts: integration and rate must be > 0");
  const double n = mean_rate * integration_s;
  const auto phv = blinking_port_probs(u, BasisLabel::HV, sync_error);
  const auto pda = blinking_port_probs(u, BasisLabel::DA, sync_error);
  Rng rng = make_rng(seed, 0x626c696e6bULL);
  BlinkingCounts c;
  c.hv = {poisson(rng, n * phv[0]), poisson(rng, n * phv[1])};
  c.da = {poisson(rng, n * pda[0]), poisson(rng, n * pda[1])};
  return c;
}

}  // namespace polcomp
