#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>

#include "polcomp/error.hpp"
#include "polcomp/polmath.hpp"

using namespace polcomp;

namespace {

// Plain 2x2 arithmetic, kept apart from the Eigen code under test.
using M2 = std::array<std::array<cplx, 2>, 2>;

M2 mul(const M2& a, const M2& b) {
  M2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

M2 rot(double t) {
  return {{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}}};
}

M2 retarder_oracle(double delta, double theta) {
  const M2 d{{{1.0, 0.0}, {0.0, std::polar(1.0, delta)}}};
  return mul(mul(rot(theta), d), rot(-theta));
}

bool same_up_to_phase(const M2& a, const Eigen::Matrix2cd& b, double tol) {
  cplx ip = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ip += std::conj(a[i][j]) * b(i, j);
  return std::abs(std::abs(ip) / 2.0 - 1.0) < tol;
}

double max_dev_from_identity(const Eigen::Matrix2cd& m) {
  return (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("polmath") {

TEST_CASE("retarder matches the rotated diagonal form") {
  for (double delta : {kPi / 2, kPi, 0.3}) {
    for (double theta : {0.0, 0.2, kPi / 4, 1.3, 2.9}) {
      CHECK(same_up_to_phase(retarder_oracle(delta, theta),
                             retarder_unitary(delta, theta).matrix(), 1e-12));
    }
  }
}

TEST_CASE("half-wave plate at 22.5 degrees takes H to D") {
  const JonesState out =
      retarder_unitary(kPi, deg_to_rad(22.5)).apply(JonesState::H());
  CHECK(out.overlap(JonesState::D()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quarter-wave plate at 45 degrees takes H to circular") {
  const JonesState out =
      retarder_unitary(kPi / 2, deg_to_rad(45)).apply(JonesState::H());
  CHECK(out.overlap(JonesState::D()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.overlap(JonesState::H()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("standard controller at zero is diagonal") {
  const Unitary2 u = paddle_unitary(PaddleController::standard());
  CHECK(std::abs(u(0, 1)) < 1e-12);
  CHECK(std::abs(u(1, 0)) < 1e-12);
}

TEST_CASE("paddle_unitary composes paddle 0 first") {
  PaddleController c({kPi / 2, kPi, kPi / 2}, {0.1, 0.7, 2.2});
  M2 expect = retarder_oracle(kPi / 2, 0.1);
  expect = mul(retarder_oracle(kPi, 0.7), expect);
  expect = mul(retarder_oracle(kPi / 2, 2.2), expect);
  CHECK(same_up_to_phase(expect, paddle_unitary(c).matrix(), 1e-12));
}

TEST_CASE("angles wrap into a half turn") {
  CHECK(wrap_half_turn(kPi) == doctest::Approx(0.0));
  CHECK(wrap_half_turn(-0.25) == doctest::Approx(kPi - 0.25));
  CHECK(wrap_half_turn(3 * kPi + 0.5) == doctest::Approx(0.5));
  PaddleController c;
  c.set_angle(1, 4.0);
  CHECK(c.angle(1) >= 0.0);
  CHECK(c.angle(1) < kPi);
}

TEST_CASE("unitarity closure over random controllers") {
  Rng rng(11);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    PaddleController c({kPi / 2, kPi, kPi / 2}, {ang(rng), ang(rng), ang(rng)});
    CHECK(max_dev_from_identity(paddle_unitary(c).matrix()) < 1e-10);
    const Unitary2 prod =
        retarder_unitary(ang(rng), ang(rng)) * retarder_unitary(ang(rng), ang(rng));
    CHECK(max_dev_from_identity(prod.matrix()) < 1e-10);
  }
}

TEST_CASE("outcome probabilities are normalised") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double p = uniform01(rng);
    const TwoQubitState rho =
        apply_local(haar_unitary(rng), haar_unitary(rng), werner_state(p));
    for (auto [a, b] : {std::pair{BasisLabel::HV, BasisLabel::HV},
                        std::pair{BasisLabel::DA, BasisLabel::HV},
                        std::pair{BasisLabel::DA, BasisLabel::DA}}) {
      const auto pr = outcome_probs(rho, MeasBasis::of(a), MeasBasis::of(b));
      double sum = 0;
      for (double x : pr) {
        CHECK(x >= -1e-12);
        sum += x;
      }
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    CHECK(rho.min_eigenvalue() >= -1e-10);
  }
}

TEST_CASE("phi+ keeps HV correlations under u (x) conj(u) for real u") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const double t = 2 * kPi * uniform01(rng);
    Eigen::Matrix2cd m;
    m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const Unitary2 u(m);
    const auto pr = outcome_probs(apply_local(u, u.conjugate(), phi_plus()),
                                  MeasBasis::hv(), MeasBasis::hv());
    CHECK(std::abs(pr[1]) < 1e-10);
    CHECK(std::abs(pr[2]) < 1e-10);
  }
}

TEST_CASE("phi+ is invariant under u (x) conj(u) for any unitary") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const Unitary2 u = haar_unitary(rng);
    const auto rho = apply_local(u, u.conjugate(), phi_plus());
    CHECK((rho.rho() - phi_plus().rho()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("retarders are periodic in a half turn") {
  Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    const double delta = 2 * kPi * uniform01(rng);
    const double theta = 2 * kPi * uniform01(rng);
    const JonesState in(cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5),
                        cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5));
    for (BasisLabel b : {BasisLabel::HV, BasisLabel::DA}) {
      const auto p1 = single_arm_probs(in, retarder_unitary(delta, theta),
                                       MeasBasis::of(b));
      const auto p2 = single_arm_probs(in, retarder_unitary(delta, theta + kPi),
                                       MeasBasis::of(b));
      CHECK(p1[0] == doctest::Approx(p2[0]).epsilon(1e-12));
      CHECK(p1[1] == doctest::Approx(p2[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("Werner state outcome statistics") {
  // p |phi+><phi+| + (1-p) I/4 gives wrong-port probability (1-p)/2 in
  // both bases.
  for (double p : {0.0, 0.5, 0.933, 1.0}) {
    const auto hv = outcome_probs(werner_state(p), MeasBasis::hv(), MeasBasis::hv());
    const auto da = outcome_probs(werner_state(p), MeasBasis::da(), MeasBasis::da());
    CHECK(hv[1] + hv[2] == doctest::Approx((1 - p) / 2).epsilon(1e-12));
    CHECK(da[1] + da[2] == doctest::Approx((1 - p) / 2).epsilon(1e-12));
    CHECK(werner_state(p).purity() ==
          doctest::Approx(p * p + (1 - p * p) / 4).epsilon(1e-12));
  }
}

TEST_CASE("quaternion round trip") {
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const Unitary2 u = haar_unitary(rng);
    CHECK(u.overlap(from_quaternion(su2_quaternion(u))) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("su2 rotation by pi about z is a diagonal phase flip") {
  const Unitary2 u = su2_rotation({0, 0, 1}, kPi / 2);
  const JonesState d = u.apply(JonesState::D());
  CHECK(d.overlap(JonesState::A()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(JonesState(0.0, 0.0), InvalidArgument);
  Eigen::Matrix2cd m;
  m << 1, 0, 0, 2;
  CHECK_THROWS_AS(Unitary2{m}, InvalidArgument);
  Eigen::Matrix4cd r = Eigen::Matrix4cd::Identity();
  CHECK_THROWS_AS(TwoQubitState{r}, InvalidArgument);
  CHECK_THROWS_AS(werner_state(1.5), InvalidArgument);
}

}
