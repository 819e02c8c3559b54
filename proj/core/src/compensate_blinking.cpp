#include <algorithm>
#include <numeric>
#include <random>

#include "compensate_internal.hpp"
#include "polcomp/error.hpp"

namespace polcomp {

void BlinkingConfig::validate() const {
  if (!(integration_s > 0.0))
    throw InvalidArgument("BlinkingConfig: integration time must be > 0");
  if (!(sync_error >= 0.0 && sync_error < 0.5))
    throw InvalidArgument("BlinkingConfig: sync_error must be in [0, 0.5)");
  if (!(target_global > 0.0 && target_global <= 1.0))
    throw InvalidArgument("BlinkingConfig: target must be in (0, 1]");
  if (max_windows < 1 || coarse_step_deg < 1 || fine_step_deg < 1)
    throw InvalidArgument("BlinkingConfig: budgets and steps must be >= 1");
  if (!(mean_rate > 0.0))
    throw InvalidArgument("BlinkingConfig: mean rate must be > 0");
}

namespace {

class BlinkBench {
 public:
  BlinkBench(CompensatedPath& path, const BlinkingConfig& cfg, std::uint64_t seed)
      : act(path), cfg_(cfg), seed_(seed) {}

  // Summed cross-port fraction of both windows of one blink period.
  double cross_fraction() {
    const std::uint64_t s = derive_seed(seed_, static_cast<std::uint64_t>(shots));
    ++shots;
    const Unitary2 u = effective_unitary(act.path());
    if (cfg_.mode == MeasurementMode::expectation)
      return blinking_port_probs(u, BasisLabel::HV, cfg_.sync_error)[1] +
             blinking_port_probs(u, BasisLabel::DA, cfg_.sync_error)[1];
    const BlinkingCounts c =
        blinking_counts(u, cfg_.integration_s, cfg_.mean_rate, cfg_.sync_error, s);
    auto frac = [](const std::array<std::int64_t, 2>& n) {
      const auto t = n[0] + n[1];
      return t > 0 ? static_cast<double>(n[1]) / static_cast<double>(t) : 0.5;
    };
    return frac(c.hv) + frac(c.da);
  }

  detail::Actuator act;
  std::int64_t shots = 0;

 private:
  const BlinkingConfig& cfg_;
  std::uint64_t seed_;
};

// Mean visibility equivalent of a summed cross fraction.
double as_visibility(double cross) { return 1.0 - cross; }

}  // namespace

CompensationReport compensate_blinking(CompensatedPath& path,
                                       const BlinkingConfig& cfg,
                                       const CostModel& cost,
                                       std::uint64_t seed) {
  cfg.validate();
  BlinkBench bench(path, cfg, derive_seed(seed, 1));
  Rng rng = make_rng(seed, 2);
  const std::size_t n = bench.act.paddles();
  // Summed cross fractions equal one minus the mean visibility.
  const double goal = 1.0 - cfg.target_global;

  auto budget_left = [&] { return bench.shots < cfg.max_windows; };
  double f = bench.cross_fraction();
  bool converged = f <= goal;
  std::int64_t decisions = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best_f = f;
  std::vector<double> best_angles = path.controller.angles();

  while (!converged && budget_left()) {
    for (int step : {cfg.coarse_step_deg, cfg.fine_step_deg}) {
      bool improved = true;
      while (improved && !converged && budget_left()) {
        improved = false;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
          ++decisions;
          for (int dir : {1, -1}) {
            bool moved = false;
            while (f > goal && budget_left()) {
              bench.act.rotate_deg(i, dir * step);
              const double g = bench.cross_fraction();
              if (g < f) {
                f = g;
                moved = improved = true;
              } else {
                bench.act.rotate_deg(i, -dir * step);
                break;
              }
            }
            if (moved) break;
          }
          if (f <= goal) {
            converged = true;
            break;
          }
        }
      }
    }
    if (f < best_f) {
      best_f = f;
      best_angles = path.controller.angles();
    }
    if (converged || !budget_left()) break;
    // Stalled far from the optimum: kick one paddle and start over.
    if (as_visibility(f) < cfg.restart_below) {
      std::uniform_int_distribution<std::size_t> which(0, n - 1);
      std::uniform_real_distribution<double> kick(30.0, 90.0);
      const std::size_t i = which(rng);
      bench.act.rotate_deg(i, kick(rng));
      ++decisions;
    }
    f = bench.cross_fraction();
    converged = f <= goal;
  }

  if (!converged && best_f < f) {
    for (std::size_t i = 0; i < n; ++i)
      bench.act.set_deg(i, rad_to_deg(best_angles[i]));
  }

  CompensationReport r;
  r.method = Method::blinking;
  r.converged = converged;
  r.decisions = decisions;
  const Unitary2 u = effective_unitary(path);
  const auto hv = blinking_port_probs(u, BasisLabel::HV, cfg.sync_error);
  const auto da = blinking_port_probs(u, BasisLabel::DA, cfg.sync_error);
  r.final_visibility_hv = hv[0] - hv[1];
  r.final_visibility_da = da[0] - da[1];
  detail::fill_common(r, bench.act, bench.shots);
  finalize_costs(r, cost);
  return r;
}

}  // namespace polcomp
