#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "compensate_internal.hpp"
#include "polcomp/error.hpp"

namespace polcomp {

void QberConfig::validate() const {
  if (!(acquisition_s > 0.0))
    throw InvalidArgument("QberConfig: acquisition window must be > 0");
  if (bin_width_ps <= 0 || window_ps <= 0 || max_offset_ps < bin_width_ps)
    throw InvalidArgument("QberConfig: invalid histogram or window settings");
  if (!(target_qber >= 0.0 && target_qber <= 0.5) || !(target_sigmas >= 0.0))
    throw InvalidArgument("QberConfig: invalid target");
  if (max_sweeps < 1 || scan_points < 5)
    throw InvalidArgument("QberConfig: need >= 1 sweep and >= 5 scan points");
  if (!(grid_step_deg > 0.0 && grid_step_deg <= 90.0))
    throw InvalidArgument("QberConfig: grid step must be in (0, 90]");
  detector_a.validate();
  detector_b.validate();
}

namespace {

std::int64_t fibre_delay_ps(const FibreLink& l) {
  return static_cast<std::int64_t>(std::llround(l.length_km * kFibreDelayPsPerKm));
}

class QberBench {
 public:
  QberBench(CompensatedPath& a, const CompensatedPath& b, const SourceModel& src,
            const QberConfig& cfg, std::uint64_t seed)
      : act(a), b_(b), src_(src), cfg_(cfg), seed_(seed) {
    armA_ = {cfg.detector_a, transmission_probability(a.link), fibre_delay_ps(a.link)};
    armB_ = {cfg.detector_b, transmission_probability(b.link),
             fibre_delay_ps(b.link) + cfg.skew_b_ps};
  }

  // Histograms one acquisition at the current angles and locks the delay.
  void find_delay_now() {
    const Acquisition acq = acquire();
    const CorrelationHistogram h = cross_correlate(
        acq.streams.a, acq.streams.b, cfg_.bin_width_ps, cfg_.max_offset_ps);
    delay_ps_ = std::llround(find_delay(h, cfg_.min_confidence).offset_ps);
    last_ = record(tally(acq));
  }

  Estimate evaluate() {
    if (cfg_.mode == MeasurementMode::expectation) {
      ++shots;
      return record({expected_qber(delivered_state(act.path(), b_, src_)), 0.0});
    }
    return record(tally(acquire()));
  }

  struct Sample {
    std::array<double, 4> x;  // controller quaternion
    double q;
  };
  std::vector<Sample> samples;

  const Estimate& last() const { return last_; }

  detail::Actuator act;
  std::int64_t shots = 0;

 private:
  Acquisition acquire() {
    const std::uint64_t s = derive_seed(seed_, static_cast<std::uint64_t>(shots));
    ++shots;
    return acquire_two_basis(src_, delivered_state(act.path(), b_, src_), armA_,
                             armB_, cfg_.acquisition_s, s);
  }

  Estimate record(const Estimate& e) {
    samples.push_back({su2_quaternion(paddle_unitary(act.path().controller)), e.value});
    return e;
  }

  Estimate tally(const Acquisition& acq) {
    const CoincidenceTally t = count_coincidences(
        acq.streams.a, acq.streams.b, delay_ps_, cfg_.window_ps, acq.schedule);
    if (t.total() == 0) return {0.5, 0.5};
    return qber(t);
  }

  const CompensatedPath& b_;
  const SourceModel& src_;
  const QberConfig& cfg_;
  std::uint64_t seed_;
  Arm armA_, armB_;
  std::int64_t delay_ps_ = 0;
  Estimate last_;
};

bool on_target(const Estimate& q, const QberConfig& cfg) {
  return q.value <= cfg.target_qber + cfg.target_sigmas * q.std_error;
}

// As a function of one paddle orientation the QBER is a trigonometric
// polynomial of degree two in 2 theta.  Least-squares fit, then the
// minimum of the fit on a 0.5 degree lattice.
double harmonic_argmin_deg(const std::vector<double>& theta_deg,
                           const std::vector<double>& q) {
  const auto m = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd a(m, 5);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = deg_to_rad(theta_deg[static_cast<std::size_t>(k)]);
    a.row(k) << 1.0, std::cos(2 * t), std::sin(2 * t), std::cos(4 * t), std::sin(4 * t);
    y(k) = q[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  double best = 0.0, best_val = INFINITY;
  for (int k = 0; k < 360; ++k) {
    const double t = deg_to_rad(0.5 * k);
    const double v = c(0) + c(1) * std::cos(2 * t) + c(2) * std::sin(2 * t) +
                     c(3) * std::cos(4 * t) + c(4) * std::sin(4 * t);
    if (v < best_val) {
      best_val = v;
      best = 0.5 * k;
    }
  }
  return best;
}

// For a fixed delivered state the QBER is a quadratic form x^T A x in the
// unit quaternion x of the adjustable controller.  Fits the ten entries of
// A to every acquisition so far; returns false while the fit is singular.
bool model_minimum(const std::vector<QberBench::Sample>& samples,
                   std::array<double, 4>& x_min) {
  constexpr int kTerms = 10;
  if (samples.size() < kTerms) return false;
  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(m, kTerms);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& x = samples[static_cast<std::size_t>(k)].x;
    int col = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) a(k, col++) = (i == j ? 1.0 : 2.0) * x[i] * x[j];
    y(k) = samples[static_cast<std::size_t>(k)].q;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < kTerms) return false;
  const Eigen::VectorXd c = qr.solve(y);
  Eigen::Matrix4d form;
  int col = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) form(i, j) = form(j, i) = c(col++);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(form);
  const Eigen::Vector4d v = es.eigenvectors().col(0);
  x_min = {v(0), v(1), v(2), v(3)};
  return true;
}

// Coordinate descent: each paddle is scanned over a half turn and parked at
// the minimum of the fitted harmonic.  After each sweep the controller
// jumps to the minimum of the quadratic model when that model is defined.
bool scan_descent(QberBench& bench, const QberConfig& cfg, Estimate& q,
                  std::int64_t& decisions) {
  const std::size_t n = bench.act.paddles();
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> theta, val;
      for (int k = 0; k < cfg.scan_points; ++k) {
        const double t = 180.0 * k / cfg.scan_points;
        bench.act.set_deg(i, t);
        theta.push_back(t);
        val.push_back(bench.evaluate().value);
      }
      ++decisions;
      bench.act.set_deg(i, harmonic_argmin_deg(theta, val));
    }
    std::array<double, 4> x{};
    if (model_minimum(bench.samples, x)) {
      PaddleController trial = bench.act.path().controller;
      const Unitary2 target = from_quaternion(x);
      detail::maximise_over_angles(
          trial, [&] { return paddle_unitary(trial).overlap(target); });
      ++decisions;
      for (std::size_t i = 0; i < n; ++i)
        bench.act.set_deg(i, rad_to_deg(trial.angle(i)));
    }
    q = bench.evaluate();
    if (on_target(q, cfg)) return true;
  }
  return false;
}

bool grid_descent(QberBench& bench, const QberConfig& cfg, Estimate& q,
                  std::int64_t& decisions) {
  const std::size_t n = bench.act.paddles();
  const int points = std::max(1, static_cast<int>(std::floor(180.0 / cfg.grid_step_deg)));
  std::vector<int> idx(n, 0);
  std::vector<double> best(n, 0.0);
  double best_val = INFINITY;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) bench.act.set_deg(i, idx[i] * cfg.grid_step_deg);
    const Estimate e = bench.evaluate();
    if (e.value < best_val) {
      best_val = e.value;
      for (std::size_t i = 0; i < n; ++i) best[i] = idx[i] * cfg.grid_step_deg;
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == points) idx[k++] = 0;
    if (k == n) break;
  }
  ++decisions;
  for (std::size_t i = 0; i < n; ++i) bench.act.set_deg(i, best[i]);
  q = bench.evaluate();
  // Local refinement around the lattice winner.
  for (double step = cfg.grid_step_deg / 2; step >= 1.0 && !on_target(q, cfg); step /= 2) {
    bool improved = true;
    while (improved && !on_target(q, cfg)) {
      improved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (double d : {step, -step}) {
          bench.act.rotate_deg(i, d);
          const Estimate e = bench.evaluate();
          if (e.value < q.value) {
            q = e;
            improved = true;
            break;
          }
          bench.act.rotate_deg(i, -d);
        }
      }
      ++decisions;
    }
  }
  return on_target(q, cfg);
}

}  // namespace

CompensationReport compensate_qber(CompensatedPath& pathA,
                                   const CompensatedPath& pathB,
                                   const SourceModel& src,
                                   const QberConfig& cfg, const CostModel& cost,
                                   std::uint64_t seed) {
  cfg.validate();
  src.validate();
  if (&pathA == &pathB)
    throw InvalidArgument("compensate_qber: the two paths must differ");

  QberBench bench(pathA, pathB, src, cfg, derive_seed(seed, 1));
  std::int64_t decisions = 0;
  Estimate q;
  if (cfg.mode == MeasurementMode::sampled) {
    bench.find_delay_now();
    q = bench.last();
  } else {
    q = bench.evaluate();
  }

  bool converged = on_target(q, cfg);
  if (!converged)
    converged = cfg.grid_search ? grid_descent(bench, cfg, q, decisions)
                                : scan_descent(bench, cfg, q, decisions);

  CompensationReport r;
  r.method = Method::qber_min;
  r.converged = converged;
  r.decisions = decisions;
  r.final_qber = q;
  const TwoQubitState rho = delivered_state(pathA, pathB, src);
  const auto hv = outcome_probs(rho, MeasBasis::hv(), MeasBasis::hv());
  const auto da = outcome_probs(rho, MeasBasis::da(), MeasBasis::da());
  r.final_visibility_hv = 1.0 - 2.0 * (hv[1] + hv[2]);
  r.final_visibility_da = 1.0 - 2.0 * (da[1] + da[2]);
  detail::fill_common(r, bench.act, bench.shots);
  finalize_costs(r, cost);
  return r;
}

}  // namespace polcomp
