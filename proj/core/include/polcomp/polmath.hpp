#pragma once

// Jones calculus for single photons and density-operator algebra for the
// photon pair.  Basis order for two-photon operators is |HH>, |HV>, |VH>,
// |VV> with the first factor belonging to user A.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

#include "polcomp/rng.hpp"

namespace polcomp {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Normalised single-photon polarization state.
class JonesState {
 public:
  /// Normalises (h, v); throws InvalidArgument on the zero vector.
  JonesState(cplx h, cplx v);

  static JonesState H();
  static JonesState V();
  static JonesState D();
  static JonesState A();

  cplx h() const noexcept { return amp_(0); }
  cplx v() const noexcept { return amp_(1); }
  const Eigen::Vector2cd& vector() const noexcept { return amp_; }

  /// |<this|other>|^2
  double overlap(const JonesState& other) const;

 private:
  Eigen::Vector2cd amp_;
};

/// 2x2 unitary acting on a polarization qubit.
class Unitary2 {
 public:
  Unitary2();  // identity

  /// Throws InvalidArgument when m^dagger m deviates from I by more than 1e-10.
  explicit Unitary2(const Eigen::Matrix2cd& m);

  static Unitary2 identity() { return {}; }

  const Eigen::Matrix2cd& matrix() const noexcept { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  Unitary2 adjoint() const;
  Unitary2 conjugate() const;
  Unitary2 transpose() const;

  JonesState apply(const JonesState& s) const;

  /// Phase-insensitive closeness, |tr(U^dagger W)| / 2, in [0, 1].
  double overlap(const Unitary2& other) const;

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b);

 private:
  struct Trusted {};
  Unitary2(const Eigen::Matrix2cd& m, Trusted) : m_(m) {}

  Eigen::Matrix2cd m_;
};

bool is_unitary(const Eigen::Matrix2cd& m, double tol = 1e-10);

/// Density operator of the photon pair.
class TwoQubitState {
 public:
  /// Validates hermiticity, unit trace and eigenvalues >= -1e-10.
  explicit TwoQubitState(const Eigen::Matrix4cd& rho);

  const Eigen::Matrix4cd& rho() const noexcept { return rho_; }
  cplx operator()(int r, int c) const { return rho_(r, c); }

  double trace() const;
  double purity() const;
  double min_eigenvalue() const;

 private:
  friend TwoQubitState apply_local(const Unitary2&, const Unitary2&,
                                   const TwoQubitState&);
  struct Trusted {};
  TwoQubitState(const Eigen::Matrix4cd& rho, Trusted) : rho_(rho) {}

  Eigen::Matrix4cd rho_;
};

enum class BasisLabel { HV, DA };

std::string_view to_string(BasisLabel b) noexcept;
BasisLabel other(BasisLabel b) noexcept;

/// A two-outcome polarization analyser.  Port 0 is H (resp. D), port 1 is
/// V (resp. A).
struct MeasBasis {
  BasisLabel label;
  JonesState port0;
  JonesState port1;

  static MeasBasis hv();
  static MeasBasis da();
  static MeasBasis of(BasisLabel label);

  /// The state that leaves the analyser through port 0 with certainty.
  const JonesState& nominal() const noexcept { return port0; }
};

/// Stack of rotatable fibre loops.  Each paddle is a linear retarder with a
/// fixed retardance and an adjustable orientation; orientations are kept in
/// [0, pi) since a retarder is invariant under a half-turn.
class PaddleController {
 public:
  /// Quarter-half-quarter stack with all paddles at 0.
  PaddleController();
  PaddleController(std::vector<double> retardances, std::vector<double> angles);

  static PaddleController standard() { return {}; }

  std::size_t size() const noexcept { return retardances_.size(); }
  const std::vector<double>& retardances() const noexcept {
    return retardances_;
  }
  const std::vector<double>& angles() const noexcept { return angles_; }
  double angle(std::size_t i) const { return angles_.at(i); }

  void set_angle(std::size_t i, double theta);
  void rotate(std::size_t i, double delta) { set_angle(i, angle(i) + delta); }

  friend bool operator==(const PaddleController&,
                         const PaddleController&) = default;

 private:
  std::vector<double> retardances_;
  std::vector<double> angles_;
};

/// Wraps an angle into [0, pi).
double wrap_half_turn(double theta);

/// R(theta) diag(1, e^{i delta}) R(-theta).
Unitary2 retarder_unitary(double delta, double theta);

/// Paddle 0 acts first; the last paddle acts last.
Unitary2 paddle_unitary(const PaddleController& c);

/// Haar-distributed SU(2) element.
Unitary2 haar_unitary(Rng& rng);

/// SU(2) rotation exp(-i angle (n . sigma)) about a unit axis n.
Unitary2 su2_rotation(const std::array<double, 3>& axis, double angle);

/// Unit quaternion (a0, a1, a2, a3) with u ~ a0 I - i (a1 X + a2 Y + a3 Z)
/// after removing the global phase.  Defined up to an overall sign.
std::array<double, 4> su2_quaternion(const Unitary2& u);

/// Inverse of su2_quaternion; the input is normalised first.
Unitary2 from_quaternion(const std::array<double, 4>& q);

TwoQubitState phi_plus();

/// p |phi+><phi+| + (1 - p) I/4.
TwoQubitState werner_state(double p);

/// (uA (x) uB) rho (uA (x) uB)^dagger
TwoQubitState apply_local(const Unitary2& uA, const Unitary2& uB,
                          const TwoQubitState& rho);

/// (p00, p01, p10, p11); index = 2 * portA + portB.
std::array<double, 4> outcome_probs(const TwoQubitState& rho,
                                    const MeasBasis& basisA,
                                    const MeasBasis& basisB);

/// Probabilities at the two ports of `basis` for `input` sent through `u`.
std::array<double, 2> single_arm_probs(const JonesState& input,
                                       const Unitary2& u,
                                       const MeasBasis& basis);

}  // namespace polcomp
