#include "polcomp/polmath.hpp"

#include <cmath>
#include <random>

#include "polcomp/error.hpp"

namespace polcomp {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kStateTol = 1e-10;

Eigen::Matrix2cd rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2cd r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

// JonesState

JonesState::JonesState(cplx h, cplx v) {
  const double n = std::sqrt(std::norm(h) + std::norm(v));
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidArgument("JonesState: zero or non-finite amplitude vector");
  amp_ << h / n, v / n;
}

JonesState JonesState::H() { return {1.0, 0.0}; }
JonesState JonesState::V() { return {0.0, 1.0}; }
JonesState JonesState::D() { return {1.0, 1.0}; }
JonesState JonesState::A() { return {1.0, -1.0}; }

double JonesState::overlap(const JonesState& other) const {
  return std::norm(amp_.dot(other.amp_));
}

// Unitary2

bool is_unitary(const Eigen::Matrix2cd& m, double tol) {
  const Eigen::Matrix2cd d = m.adjoint() * m - Eigen::Matrix2cd::Identity();
  return d.cwiseAbs().maxCoeff() <= tol;
}

Unitary2::Unitary2() : m_(Eigen::Matrix2cd::Identity()) {}

Unitary2::Unitary2(const Eigen::Matrix2cd& m) : m_(m) {
  if (!is_unitary(m, kUnitaryTol))
    throw InvalidArgument("Unitary2: matrix is not unitary within 1e-10");
}

Unitary2 Unitary2::adjoint() const { return {m_.adjoint(), Trusted{}}; }
Unitary2 Unitary2::conjugate() const { return {m_.conjugate(), Trusted{}}; }
Unitary2 Unitary2::transpose() const { return {m_.transpose(), Trusted{}}; }

JonesState Unitary2::apply(const JonesState& s) const {
  const Eigen::Vector2cd out = m_ * s.vector();
  return {out(0), out(1)};
}

double Unitary2::overlap(const Unitary2& other) const {
  return std::abs((m_.adjoint() * other.m_).trace()) / 2.0;
}

Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
  return {a.m_ * b.m_, Unitary2::Trusted{}};
}

// TwoQubitState

TwoQubitState::TwoQubitState(const Eigen::Matrix4cd& rho) : rho_(rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
    throw InvalidArgument("TwoQubitState: operator is not Hermitian");
  if (std::abs(trace() - 1.0) > kStateTol)
    throw InvalidArgument("TwoQubitState: trace differs from 1");
  if (min_eigenvalue() < -kStateTol)
    throw InvalidArgument("TwoQubitState: operator is not positive");
}

double TwoQubitState::trace() const { return rho_.trace().real(); }

double TwoQubitState::purity() const { return (rho_ * rho_).trace().real(); }

double TwoQubitState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho_,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Bases

std::string_view to_string(BasisLabel b) noexcept {
  return b == BasisLabel::HV ? "HV" : "DA";
}

BasisLabel other(BasisLabel b) noexcept {
  return b == BasisLabel::HV ? BasisLabel::DA : BasisLabel::HV;
}

MeasBasis MeasBasis::hv() {
  return {BasisLabel::HV, JonesState::H(), JonesState::V()};
}
MeasBasis MeasBasis::da() {
  return {BasisLabel::DA, JonesState::D(), JonesState::A()};
}
MeasBasis MeasBasis::of(BasisLabel label) {
  return label == BasisLabel::HV ? hv() : da();
}

// PaddleController

double wrap_half_turn(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t = 0.0;
  return t;
}

PaddleController::PaddleController()
    : retardances_{kPi / 2, kPi, kPi / 2}, angles_{0.0, 0.0, 0.0} {}

PaddleController::PaddleController(std::vector<double> retardances,
                                   std::vector<double> angles)
    : retardances_(std::move(retardances)), angles_(std::move(angles)) {
  if (retardances_.size() != angles_.size())
    throw InvalidArgument("PaddleController: " +
                          std::to_string(retardances_.size()) +
                          " retardances but " + std::to_string(angles_.size()) +
                          " angles");
  for (double& a : angles_) a = wrap_half_turn(a);
}

void PaddleController::set_angle(std::size_t i, double theta) {
  angles_.at(i) = wrap_half_turn(theta);
}

// Operators

Unitary2 retarder_unitary(double delta, double theta) {
  const Eigen::Matrix2cd r = rotation(theta);
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, delta);
  return Unitary2(r * d * r.transpose());
}

Unitary2 paddle_unitary(const PaddleController& c) {
  Unitary2 u;
  for (std::size_t i = 0; i < c.size(); ++i)
    u = retarder_unitary(c.retardances()[i], c.angles()[i]) * u;
  return u;
}

Unitary2 su2_rotation(const std::array<double, 3>& axis, double angle) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] +
                             axis[2] * axis[2]);
  if (!(n > 0.0)) throw InvalidArgument("su2_rotation: zero axis");
  const double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  const cplx i(0.0, 1.0);
  const double c = std::cos(angle), s = std::sin(angle);
  // exp(-i angle n.sigma) = cos(angle) I - i sin(angle) n.sigma
  Eigen::Matrix2cd m;
  m << c - i * s * z, -i * s * (x - i * y), -i * s * (x + i * y), c + i * s * z;
  return Unitary2(m);
}

std::array<double, 4> su2_quaternion(const Unitary2& u) {
  const Eigen::Matrix2cd& m = u.matrix();
  const cplx phase = std::sqrt(m.determinant());
  const Eigen::Matrix2cd s = m / phase;
  return {0.5 * (s(0, 0) + s(1, 1)).real(), -0.5 * (s(0, 1) + s(1, 0)).imag(),
          0.5 * (s(1, 0) - s(0, 1)).real(), -0.5 * (s(0, 0) - s(1, 1)).imag()};
}

Unitary2 from_quaternion(const std::array<double, 4>& q) {
  const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  if (!(n > 0.0)) throw InvalidArgument("from_quaternion: zero quaternion");
  const double a = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << a - i * z, -i * x - y, -i * x + y, a + i * z;
  return Unitary2(m);
}

Unitary2 haar_unitary(Rng& rng) {
  std::normal_distribution<double> g;
  double q[4];
  double n = 0.0;
  do {
    n = 0.0;
    for (double& x : q) {
      x = g(rng);
      n += x * x;
    }
  } while (n < 1e-12);
  n = std::sqrt(n);
  for (double& x : q) x /= n;
  const cplx a(q[0], q[3]);
  const cplx b(q[2], q[1]);
  Eigen::Matrix2cd m;
  m << a, b, -std::conj(b), std::conj(a);
  return Unitary2(m);
}

TwoQubitState phi_plus() { return werner_state(1.0); }

TwoQubitState werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidArgument("werner_state: weight must lie in [0, 1]");
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() * ((1.0 - p) / 4.0);
  rho(0, 0) += p / 2.0;
  rho(3, 3) += p / 2.0;
  rho(0, 3) += p / 2.0;
  rho(3, 0) += p / 2.0;
  return TwoQubitState(rho);
}

TwoQubitState apply_local(const Unitary2& uA, const Unitary2& uB,
                          const TwoQubitState& rho) {
  const Eigen::Matrix4cd k = kron(uA.matrix(), uB.matrix());
  Eigen::Matrix4cd out = k * rho.rho() * k.adjoint();
  // Restore exact hermiticity lost to rounding.
  out = 0.5 * (out + out.adjoint()).eval();
  return {out, TwoQubitState::Trusted{}};
}

std::array<double, 4> outcome_probs(const TwoQubitState& rho,
                                    const MeasBasis& basisA,
                                    const MeasBasis& basisB) {
  const JonesState* a[2] = {&basisA.port0, &basisA.port1};
  const JonesState* b[2] = {&basisB.port0, &basisB.port1};
  std::array<double, 4> p{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector4cd ket;
      const auto& va = a[i]->vector();
      const auto& vb = b[j]->vector();
      ket << va(0) * vb(0), va(0) * vb(1), va(1) * vb(0), va(1) * vb(1);
      p[2 * i + j] = ket.dot(rho.rho() * ket).real();
    }
  }
  return p;
}

std::array<double, 2> single_arm_probs(const JonesState& input,
                                       const Unitary2& u,
                                       const MeasBasis& basis) {
  const JonesState out = u.apply(input);
  const double p0 = basis.port0.overlap(out);
  return {p0, 1.0 - p0};
}

}  // namespace polcomp
