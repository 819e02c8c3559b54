#include <algorithm>
#include <cmath>
#include <vector>

#include "compensate_internal.hpp"
#include "polcomp/error.hpp"

namespace polcomp {

void MpcConfig::validate() const {
  for (double t : {threshold_hv, threshold_da, threshold_global})
    if (!(t > 0.0 && t <= 1.0))
      throw InvalidArgument("MpcConfig: thresholds must be in (0, 1]");
  if (runs_per_basis < 1 || max_basis_switches < 1)
    throw InvalidArgument("MpcConfig: counters must be >= 1");
  if (!(initial_step_deg > 0.0) || !(min_step_deg > 0.0) ||
      !(max_step_deg >= min_step_deg) || !(step_gain_deg >= 0.0))
    throw InvalidArgument("MpcConfig: step sizes must be positive");
  if (!(threshold_reduction >= 0.0) || refine_cycles < 0)
    throw InvalidArgument("MpcConfig: negative reduction or refine count");
  if (!(readout_photons > 0.0))
    throw InvalidArgument("MpcConfig: readout photons must be > 0");
}

namespace {

constexpr int kMaxLineIterations = 60;

struct Probe {
  std::size_t paddle = 0;
  int direction = 1;
};

// Rotates every candidate paddle by +-step and back; the paddle whose
// rotation changes the visibility most wins, ties to the lowest index.
Probe probe_impact(detail::ReferenceBench& bench, BasisLabel b, double v,
                   double step, const std::vector<bool>& excluded) {
  Probe best;
  double best_impact = -1.0;
  for (std::size_t i = 0; i < bench.act.paddles(); ++i) {
    if (excluded[i]) continue;
    double impact = 0.0;
    double gain[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      const double d = k == 0 ? step : -step;
      bench.act.rotate_deg(i, d);
      const double w = bench.visibility(b);
      bench.act.rotate_deg(i, -d);
      gain[k] = w - v;
      impact = std::max(impact, std::abs(w - v));
    }
    if (impact > best_impact) {
      best_impact = impact;
      best = {i, gain[0] >= gain[1] ? 1 : -1};
    }
  }
  return best;
}

// Hill climb on one paddle: the step starts proportional to the distance
// from perfect visibility and halves, with a direction flip, whenever the
// visibility gets worse.
double optimise_paddle(detail::ReferenceBench& bench, const MpcConfig& cfg,
                       BasisLabel b, Probe p, double v) {
  double step = std::clamp(cfg.step_gain_deg * (1.0 - v), cfg.min_step_deg,
                           cfg.max_step_deg);
  int dir = p.direction;
  for (int it = 0; it < kMaxLineIterations && step >= cfg.min_step_deg; ++it) {
    bench.act.rotate_deg(p.paddle, dir * step);
    const double w = bench.visibility(b);
    if (w > v) {
      v = w;
    } else {
      bench.act.rotate_deg(p.paddle, -dir * step);
      dir = -dir;
      step /= 2.0;
    }
  }
  return v;
}

}  // namespace

CompensationReport compensate_mpc(CompensatedPath& path, const MpcConfig& cfg,
                                  const CostModel& cost, std::uint64_t seed) {
  cfg.validate();
  detail::ReferenceBench bench(path, cfg.mode, cfg.readout_photons,
                               derive_seed(seed, 1));
  const std::size_t n = bench.act.paddles();

  double threshold[2] = {cfg.threshold_hv, cfg.threshold_da};
  double vis[2] = {0.0, 0.0};
  BasisLabel basis = BasisLabel::HV;
  bool converged = false;
  std::int64_t decisions = 0;

  std::vector<bool> excluded(n, false);
  std::size_t n_excluded = 0;
  double best_global = -INFINITY;
  std::vector<double> best_angles;
  for (int sw = 0; sw <= cfg.max_basis_switches; ++sw) {
    const int bi = basis == BasisLabel::HV ? 0 : 1;
    if (cfg.reinclude_on_switch) {
      std::fill(excluded.begin(), excluded.end(), false);
      n_excluded = 0;
    }
    double v = bench.visibility(basis);

    for (int run = 0; run < cfg.runs_per_basis && v < threshold[bi]; ++run) {
      std::vector<std::size_t> engaged;
      for (int e = 0; e < 2 && v < threshold[bi]; ++e) {
        if (n_excluded == n) {
          std::fill(excluded.begin(), excluded.end(), false);
          n_excluded = 0;
        }
        const Probe p = probe_impact(bench, basis, v, cfg.initial_step_deg, excluded);
        ++decisions;
        v = optimise_paddle(bench, cfg, basis, p, v);
        excluded[p.paddle] = true;
        ++n_excluded;
        engaged.push_back(p.paddle);
      }
      // Further rotations of the engaged paddles.
      for (int c = 0; c < cfg.refine_cycles && v < threshold[bi]; ++c) {
        const double before = v;
        for (std::size_t i : engaged)
          v = optimise_paddle(bench, cfg, basis, {i, 1}, v);
        if (v - before < 1e-3) break;
      }
    }
    if (v < threshold[bi])
      threshold[bi] = std::max(threshold[bi] - cfg.threshold_reduction, 0.0);
    vis[bi] = v;

    vis[1 - bi] = bench.visibility(other(basis));
    const double global = 0.5 * (vis[0] + vis[1]);
    if (global >= cfg.threshold_global) {
      converged = true;
      break;
    }
    if (global > best_global) {
      best_global = global;
      best_angles = detail::angles_deg(path.controller);
    }
    basis = other(basis);
  }
  // Motorized paddles can return to a recorded position.
  if (!converged && !best_angles.empty())
    for (std::size_t i = 0; i < n; ++i) bench.act.set_deg(i, best_angles[i]);

  CompensationReport r;
  r.method = Method::mpc;
  r.converged = converged;
  r.decisions = decisions;
  r.final_visibility_hv = expected_visibility(path, BasisLabel::HV);
  r.final_visibility_da = expected_visibility(path, BasisLabel::DA);
  detail::fill_common(r, bench.act, bench.shots);
  finalize_costs(r, cost);
  return r;
}

}  // namespace polcomp
