#pragma once

// Fibre paths: static birefringence, slow drift, loss, and the paddle
// controller attached to each path.

#include <cstdint>
#include <string>

#include "polcomp/polmath.hpp"

namespace polcomp {

/// Per-step drift width that makes a compensated link fluctuate with the
/// observed QBER standard deviation over a 10.8-day run with hourly steps.
/// Produced by tools/calibrate_drift; see scenarios/default.ini.
inline constexpr double kCalibratedDriftSigma = 0.0072;
inline constexpr double kDefaultDriftStepS = 3600.0;

struct FibreLink {
  std::string id;
  double length_km = 1.6;
  double loss_db = 0.0;
  Unitary2 birefringence;
  double drift_sigma = 0.0;  // rad per drift step

  void validate() const;
};

struct DriftProcess {
  double step_interval_s = kDefaultDriftStepS;
  double sigma = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class ControllerSide { receiver, source };

std::string_view to_string(ControllerSide s) noexcept;

/// One fibre path with exactly one controller.
struct CompensatedPath {
  FibreLink link;
  PaddleController controller;
  ControllerSide side = ControllerSide::receiver;
};

/// Link with Haar-random birefringence.
FibreLink make_link(std::string id, double loss_db, std::uint64_t seed,
                    double length_km = 1.6);

/// Left-multiplies the birefringence by exp(-i eps n.sigma) with n uniform on
/// the sphere and eps ~ |N(0, sigma)|.  The draw depends only on
/// (process.rng_seed, step_index).
FibreLink step_drift(const FibreLink& link, const DriftProcess& process,
                     std::uint64_t step_index);

/// Controller after the fibre for receiver-side paths, before it for
/// source-side paths.
Unitary2 effective_unitary(const CompensatedPath& path);

double transmission_probability(double loss_db);
double transmission_probability(const FibreLink& link);

}  // namespace polcomp
