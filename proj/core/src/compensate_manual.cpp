#include <algorithm>
#include <cmath>
#include <numeric>

#include "compensate_internal.hpp"
#include "polcomp/error.hpp"

namespace polcomp {

void ManualConfig::validate() const {
  if (!(target_visibility > 0.0 && target_visibility <= 1.0))
    throw InvalidArgument("ManualConfig: target must be in (0, 1]");
  if (max_alternations < 1 || coarse_step_deg < 1 || fine_step_deg < 1)
    throw InvalidArgument("ManualConfig: budgets and steps must be >= 1");
  if (!(readout_photons > 0.0))
    throw InvalidArgument("ManualConfig: readout photons must be > 0");
}

namespace {

// Walks one paddle in `step` increments while the visibility improves,
// trying the other direction if the first step does not help.
bool line_search(detail::ReferenceBench& bench, std::size_t i, BasisLabel b,
                 int step, double target, double& v) {
  bool improved = false;
  for (int dir : {1, -1}) {
    bool moved = false;
    while (v < target) {
      bench.act.rotate_deg(i, dir * step);
      const double w = bench.visibility(b);
      if (w > v) {
        v = w;
        moved = improved = true;
      } else {
        bench.act.rotate_deg(i, -dir * step);
        break;
      }
    }
    if (moved) break;
  }
  return improved;
}

}  // namespace

CompensationReport compensate_manual(CompensatedPath& path,
                                     const ManualConfig& cfg,
                                     const CostModel& cost,
                                     std::uint64_t seed) {
  cfg.validate();
  detail::ReferenceBench bench(path, cfg.mode, cfg.readout_photons,
                               derive_seed(seed, 1));
  Rng order_rng = make_rng(seed, 2);

  // Operators read the dial in whole degrees.
  for (std::size_t i = 0; i < bench.act.paddles(); ++i)
    bench.act.set_deg(i, std::round(bench.act.angle_deg(i)));

  CompensationReport r;
  r.method = Method::manual;
  std::int64_t decisions = 0;

  double vis[2] = {bench.visibility(BasisLabel::HV),
                   bench.visibility(BasisLabel::DA)};
  BasisLabel basis = BasisLabel::HV;
  bool converged = vis[0] >= cfg.target_visibility && vis[1] >= cfg.target_visibility;

  std::vector<std::size_t> order(bench.act.paddles());
  std::iota(order.begin(), order.end(), 0);

  for (int alt = 0; alt < cfg.max_alternations && !converged; ++alt) {
    const int bi = basis == BasisLabel::HV ? 0 : 1;
    double v = vis[bi];
    std::shuffle(order.begin(), order.end(), order_rng);
    for (int step : {cfg.coarse_step_deg, cfg.fine_step_deg}) {
      bool improved = true;
      while (improved && v < cfg.target_visibility) {
        improved = false;
        for (std::size_t i : order) {
          ++decisions;
          improved |= line_search(bench, i, basis, step, cfg.target_visibility, v);
          if (v >= cfg.target_visibility) break;
        }
      }
    }
    vis[bi] = v;
    // Swap the laser and analyser to the other basis and check it.
    ++decisions;
    vis[1 - bi] = bench.visibility(other(basis));
    converged = vis[0] >= cfg.target_visibility && vis[1] >= cfg.target_visibility;
    basis = other(basis);
  }

  r.converged = converged;
  r.decisions = decisions;
  r.final_visibility_hv = expected_visibility(path, BasisLabel::HV);
  r.final_visibility_da = expected_visibility(path, BasisLabel::DA);
  detail::fill_common(r, bench.act, bench.shots);
  finalize_costs(r, cost);
  return r;
}

}  // namespace polcomp
