#pragma once

#include <cstdint>
#include <functional>

#include "polcomp/compensate.hpp"

namespace polcomp::detail {

/// Controller actuator with move accounting.
class Actuator {
 public:
  explicit Actuator(CompensatedPath& path) : path_(path) {}

  double angle_deg(std::size_t i) const {
    return rad_to_deg(path_.controller.angle(i));
  }
  void rotate_deg(std::size_t i, double delta);
  void set_deg(std::size_t i, double deg);

  std::size_t paddles() const { return path_.controller.size(); }
  const CompensatedPath& path() const { return path_; }

  std::int64_t moves = 0;
  double rotation_deg = 0.0;

 private:
  CompensatedPath& path_;
};

/// One reference-laser readout per call; each readout draws its own seed.
class ReferenceBench {
 public:
  ReferenceBench(CompensatedPath& path, MeasurementMode mode, double photons,
                 std::uint64_t seed)
      : act(path), mode_(mode), photons_(photons), seed_(seed) {}

  double visibility(BasisLabel b);

  Actuator act;
  std::int64_t shots = 0;

 private:
  MeasurementMode mode_;
  double photons_;
  std::uint64_t seed_;
};

/// Lattice search then compass refinement of all paddle angles.
double maximise_over_angles(PaddleController& c,
                            const std::function<double()>& score);

std::vector<double> angles_deg(const PaddleController& c);

void fill_common(CompensationReport& r, const Actuator& act,
                 std::int64_t shots);

}  // namespace polcomp::detail
