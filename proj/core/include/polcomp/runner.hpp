#pragma once

// Experiment commands behind the polcomp tool.  Each command is a pure
// function of the scenario; file output happens in the write_* helpers.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polcomp/analysis.hpp"
#include "polcomp/compensate.hpp"
#include "polcomp/scenario.hpp"

namespace polcomp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitDelayNotFound = 4;

struct RunOptions {
  int jobs = 1;
};

/// Runs `n` independent tasks on up to `jobs` threads.  Results must be
/// written to per-index slots so that output order never depends on
/// scheduling.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& task);

// ---- plan -------------------------------------------------------------

/// Topology, channel plan, controller counts and the growth table for
/// users 2..12.  Throws ChannelExhausted when the band is too small.
nlohmann::json cmd_plan(const Scenario& s);

// ---- network construction ----------------------------------------------

/// One realisation of the network.  `paths` holds two receiver-side
/// fibre paths per logical link (photon to the lower-id user first), and
/// `user_paths` one source-side path per user.
struct Network {
  NetworkTopology topo;
  std::vector<double> link_loss_db;
  std::vector<double> link_werner_p;
  std::vector<CompensatedPath> paths;
  std::vector<CompensatedPath> user_paths;
  std::vector<DetectorModel> detectors;
  std::vector<std::int64_t> skew_ps;
};

std::uint64_t trial_seed(const Scenario& s, int trial);
Network build_network(const Scenario& s, int trial);

/// Source model seen by logical link `link` of `net`.
SourceModel link_source(const Scenario& s, const Network& net, std::size_t link);

// ---- compare ------------------------------------------------------------

struct LinkRecord {
  Method method = Method::manual;
  int trial = 0;
  std::string path_id;
  std::uint64_t seed = 0;
  CompensationReport report;
  /// qber_min only: expected QBER of the compensated link above the
  /// source's own floor.
  double polarization_qber = 0.0;
};

struct MethodSummary {
  Method method = Method::manual;
  int count = 0;
  int converged = 0;
  Estimate visibility;
  Estimate qber_contribution;
  /// Measured for qber_min (1 - 2 QBER), estimated from the polarization
  /// contribution otherwise.
  Estimate fidelity;
  bool fidelity_measured = false;
  std::optional<Estimate> qber;  // measured final QBER, qber_min only
  Estimate shots;
  Estimate modeled_time_s;
  bool disrupts_network = true;
};

struct Comparison {
  std::vector<MethodSummary> rows;
  std::vector<LinkRecord> links;
  /// QBER of every logical link after qber_min compensation, per trial.
  std::vector<double> network_qber;

  bool all_converged() const;
  std::string to_csv() const;
  std::string links_csv() const;
  nlohmann::json to_json() const;
};

/// Compensates every fibre path with each enabled method.  The canonical
/// methods act on both paths of every link; qber_min compensates each user
/// fibre against user 0, whose own fibre is aligned beforehand.
Comparison cmd_compare(const Scenario& s, const RunOptions& opt = {});

/// Mean and standard error of the mean.
Estimate mean_and_stderr(const std::vector<double>& v);

// ---- stability ----------------------------------------------------------

struct StabilityTrace {
  int trial = 0;
  std::string link_id;
  std::vector<double> qber;  // one value per drift step, step 0 first
  double std_dev = 0.0;
};

struct StabilityResult {
  double step_interval_s = 0.0;
  int steps = 0;
  std::vector<StabilityTrace> traces;
  double mean_std = 0.0;

  std::string trace_csv() const;
  nlohmann::json to_json() const;
};

/// Aligns every fibre path once, then lets the birefringence drift with
/// the controllers frozen and records the expected QBER of each logical
/// link after every step.
StabilityResult cmd_stability(const Scenario& s, double horizon_days,
                              const RunOptions& opt = {});

/// Sample standard deviation.
double sample_std(const std::vector<double>& v);

// ---- simulate -----------------------------------------------------------

struct SimulatedLink {
  std::string link_id;
  StreamPair streams;
  BasisSchedule schedule;
  std::uint64_t seed = 0;
  double expected_qber = 0.0;
  DelayEstimate delay;
  CoincidenceTally tally;
  Estimate qber;
};

struct SimulationResult {
  std::vector<SimulatedLink> links;
  nlohmann::json to_json() const;
};

/// Tag streams of every logical link of trial 0, analysed with the qber
/// settings.  Throws DelayNotFound if a link shows no correlation peak.
SimulationResult cmd_simulate(const Scenario& s, const RunOptions& opt = {});

// ---- output -------------------------------------------------------------

enum class OutputFormat { csv, json, both };

void write_text(const std::filesystem::path& p, const std::string& text);
void write_json(const std::filesystem::path& p, const nlohmann::json& j);

void write_plan(const std::filesystem::path& dir, const nlohmann::json& plan);
void write_comparison(const std::filesystem::path& dir, const Comparison& c,
                      OutputFormat f);
void write_stability(const std::filesystem::path& dir, const StabilityResult& r,
                     OutputFormat f);
/// Streams go to dir/streams/<link>_<user>.ptag with JSON sidecars.
void write_simulation(const std::filesystem::path& dir, const SimulationResult& r);

}  // namespace polcomp
