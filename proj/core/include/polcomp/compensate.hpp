#pragma once

// The four compensation procedures.  Each one drives the controller of a
// single CompensatedPath and returns a CompensationReport with unified cost
// accounting.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polcomp/analysis.hpp"
#include "polcomp/channel.hpp"
#include "polcomp/photostream.hpp"

namespace polcomp {

enum class Method { manual, mpc, blinking, qber_min };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

/// `expectation` replaces every Poisson draw by its mean; useful for
/// deterministic objectives and property checks.
enum class MeasurementMode { sampled, expectation };

/// Photons per second delivered by the attenuated reference laser.
inline constexpr double kReferenceRateHz = 1e5;

struct CostModel {
  double readout_s = 1.0;
  double move_s_per_deg = 0.0;
  double human_overhead_s = 0.0;

  void validate() const;
  /// Defaults per method.  They reflect the hardware of each realization:
  /// hand-turned paddles with a human reading counts, motorized paddles,
  /// motorized paddles behind blinking shutters, and hand-turned paddles
  /// with live QBER readout.
  static CostModel for_method(Method m);
};

struct CompensationReport {
  Method method = Method::manual;
  /// Expected visibility of the method's own readout at the final angles.
  /// For qber_min this is the two-photon correlation visibility 1 - 2 q_b.
  double final_visibility_hv = 0.0;
  double final_visibility_da = 0.0;
  std::optional<Estimate> final_qber;
  std::int64_t shots_used = 0;
  std::int64_t paddle_moves = 0;
  double rotation_deg = 0.0;
  std::int64_t decisions = 0;
  double modeled_time_s = 0.0;
  bool converged = false;
  /// Time during which the link carries no quantum traffic.
  double service_suspended_s = 0.0;
  bool disrupts_network = true;
  std::vector<double> final_angles_deg;

  double mean_visibility() const {
    return 0.5 * (final_visibility_hv + final_visibility_da);
  }
  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row(std::uint64_t seed) const;
};

/// shots * readout + total rotation * move speed + decisions * overhead.
double modeled_time(const CompensationReport& r, const CostModel& cost);

/// Fills modeled_time_s and the downtime fields of `r`.
void finalize_costs(CompensationReport& r, const CostModel& cost);

/// Counts at the port orthogonal to the nominal state of `basis` after one
/// reference readout of `photons` through the path.
Estimate objective_canonical(const CompensatedPath& path, BasisLabel basis,
                             std::uint64_t seed,
                             MeasurementMode mode = MeasurementMode::sampled,
                             double photons = kReferenceRateHz);

/// Visibility the reference laser would show in `basis`, in expectation.
double expected_visibility(const CompensatedPath& path, BasisLabel basis);

struct ManualConfig {
  double target_visibility = 0.98;
  int max_alternations = 40;
  int coarse_step_deg = 5;
  int fine_step_deg = 1;
  double readout_photons = kReferenceRateHz;
  MeasurementMode mode = MeasurementMode::sampled;

  void validate() const;
};

/// Emulated operator: line searches paddle by paddle in the active basis,
/// coarse then fine steps, switching basis whenever the active one reaches
/// the target.  Angles stay on a 1 degree lattice.  The paddle order is
/// reshuffled for every basis from the seed.
CompensationReport compensate_manual(CompensatedPath& path,
                                     const ManualConfig& cfg,
                                     const CostModel& cost,
                                     std::uint64_t seed);

struct MpcConfig {
  double initial_step_deg = 10.0;
  double threshold_hv = 0.95;
  double threshold_da = 0.98;
  double threshold_global = 0.95;
  int runs_per_basis = 4;
  double threshold_reduction = 0.002;
  int max_basis_switches = 10;
  /// Adaptive step: gain * (1 - V) degrees, clamped to [min, max].
  double step_gain_deg = 40.0;
  double min_step_deg = 0.5;
  double max_step_deg = 45.0;
  /// Alternating re-optimisations of the two engaged paddles per run.
  int refine_cycles = 3;
  /// By default a paddle stays excluded across basis switches until every
  /// paddle has been engaged.  Re-including all of them at each switch lets
  /// the most influential paddle flip between the optima of the two bases.
  bool reinclude_on_switch = false;
  double readout_photons = kReferenceRateHz;
  MeasurementMode mode = MeasurementMode::sampled;

  void validate() const;
};

CompensationReport compensate_mpc(CompensatedPath& path, const MpcConfig& cfg,
                                  const CostModel& cost, std::uint64_t seed);

struct BlinkingConfig {
  double integration_s = 0.3;
  double sync_error = kShutterTransitionS / 0.3;
  double target_global = 0.976;
  int max_windows = 400;
  int coarse_step_deg = 5;
  int fine_step_deg = 1;
  /// Below this visibility a stalled descent is restarted from a random
  /// rotation of one paddle.
  double restart_below = 0.9;
  double mean_rate = kReferenceRateHz;
  MeasurementMode mode = MeasurementMode::sampled;

  void validate() const;
};

/// One coordinate descent over all paddles on the summed cross-port
/// fractions of both bases, read out together every blink period.
CompensationReport compensate_blinking(CompensatedPath& path,
                                       const BlinkingConfig& cfg,
                                       const CostModel& cost,
                                       std::uint64_t seed);

struct QberConfig {
  double acquisition_s = 1.0;
  std::int64_t bin_width_ps = kDefaultBinWidthPs;
  std::int64_t window_ps = kDefaultWindowPs;
  std::int64_t max_offset_ps = kDefaultMaxOffsetPs;
  double min_confidence = kDefaultMinConfidence;
  /// Converged once the estimate is within target_sigmas standard errors
  /// of target_qber.
  double target_qber = 0.034;
  double target_sigmas = 2.0;
  int max_sweeps = 4;
  /// Angles sampled per paddle scan; at least five for the harmonic fit.
  int scan_points = 6;
  bool grid_search = false;
  double grid_step_deg = 15.0;
  DetectorModel detector_a;
  DetectorModel detector_b;
  /// Extra delay of user B's detection chain on top of fibre propagation.
  std::int64_t skew_b_ps = 0;
  MeasurementMode mode = MeasurementMode::sampled;

  void validate() const;
};

/// Group delay in standard single-mode fibre.
inline constexpr double kFibreDelayPsPerKm = 4.9e6;

/// Minimises the live QBER between users A and B by moving only pathA's
/// controller.  Throws DelayNotFound when the two streams show no
/// correlation peak.
CompensationReport compensate_qber(CompensatedPath& pathA,
                                   const CompensatedPath& pathB,
                                   const SourceModel& src,
                                   const QberConfig& cfg, const CostModel& cost,
                                   std::uint64_t seed);

/// Two-photon state delivered to the users of two source-side paths.
TwoQubitState delivered_state(const CompensatedPath& pathA,
                              const CompensatedPath& pathB,
                              const SourceModel& src);

/// Sets the controller so that effective_unitary(path) matches `target` up
/// to a global phase as closely as the paddle stack allows.  Returns the
/// achieved overlap |tr(U^dagger W)| / 2.
double solve_controller(CompensatedPath& path, const Unitary2& target);

}  // namespace polcomp
