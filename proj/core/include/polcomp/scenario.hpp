#pragma once

// Scenario files: flat INI text with one section per concern.  Every key is
// optional; unknown sections or keys are rejected.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "polcomp/channel.hpp"
#include "polcomp/compensate.hpp"
#include "polcomp/netplan.hpp"
#include "polcomp/photostream.hpp"

namespace polcomp {

/// Detector parameters are drawn per user, uniformly from these ranges.
struct DetectorRange {
  double efficiency_min = 0.7;
  double efficiency_max = 0.9;
  double jitter_min_ps = 60.0;
  double jitter_max_ps = 80.0;
  double dark_rate_hz = kDefaultDarkRateHz;

  void validate() const;
  DetectorModel draw(Rng& rng) const;
};

enum class SimulateCompensation { none, ideal };

struct Scenario {
  std::uint64_t seed = 7;
  int users = 4;
  /// Independent network realisations per command.
  int trials = 1;
  int center_channel = kCenterChannel;
  int band = kDemuxBand;

  SourceModel source;
  /// Per-link spread of the source imperfection, as +- percentage points of
  /// QBER.  Zero gives every link the same Werner weight.
  double werner_jitter_pp = 0.0;
  DetectorRange detectors;
  /// End-to-end loss of a logical link; each photon path carries half.
  double loss_min_db = 8.1;
  double loss_max_db = 13.0;
  double length_km = 1.6;
  /// Upper bound of the per-user detection chain delay.
  std::int64_t max_skew_ps = 100'000;

  DriftProcess drift{kDefaultDriftStepS, kCalibratedDriftSigma, 0};
  double horizon_days = 10.8;

  std::vector<Method> methods{Method::manual, Method::mpc, Method::blinking,
                              Method::qber_min};
  ManualConfig manual;
  MpcConfig mpc;
  BlinkingConfig blinking;
  double blinking_transition_s = kShutterTransitionS;
  QberConfig qber;
  std::map<Method, CostModel> costs{
      {Method::manual, CostModel::for_method(Method::manual)},
      {Method::mpc, CostModel::for_method(Method::mpc)},
      {Method::blinking, CostModel::for_method(Method::blinking)},
      {Method::qber_min, CostModel::for_method(Method::qber_min)}};

  double simulate_duration_s = 1.0;
  SimulateCompensation simulate_compensation = SimulateCompensation::ideal;

  std::filesystem::path out_dir = "out";

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Parses INI text; `origin` names the source in diagnostics.  Throws
/// ConfigError with a line number for syntax errors and the section and key
/// for bad values.
Scenario parse_scenario(std::istream& is, const std::string& origin = "<input>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace polcomp
