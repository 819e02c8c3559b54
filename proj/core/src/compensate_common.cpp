#include <cmath>
#include <sstream>

#include "compensate_internal.hpp"
#include "polcomp/error.hpp"

namespace polcomp {

namespace detail {

void Actuator::rotate_deg(std::size_t i, double delta) {
  if (delta == 0.0) return;
  path_.controller.rotate(i, deg_to_rad(delta));
  ++moves;
  rotation_deg += std::abs(delta);
}

void Actuator::set_deg(std::size_t i, double deg) {
  // Shortest way round on the half-turn circle.
  double delta = std::fmod(deg - angle_deg(i), 180.0);
  if (delta > 90.0) delta -= 180.0;
  if (delta < -90.0) delta += 180.0;
  if (std::abs(delta) < 1e-9) return;
  path_.controller.set_angle(i, deg_to_rad(deg));
  ++moves;
  rotation_deg += std::abs(delta);
}

double ReferenceBench::visibility(BasisLabel b) {
  const std::uint64_t shot_seed = derive_seed(seed_, static_cast<std::uint64_t>(shots));
  ++shots;
  const MeasBasis basis = MeasBasis::of(b);
  const Unitary2 u = effective_unitary(act.path());
  if (mode_ == MeasurementMode::expectation) {
    const auto p = single_arm_probs(basis.nominal(), u, basis);
    return p[0] - p[1];
  }
  const auto n = reference_counts(basis.nominal(), u, basis, photons_, shot_seed);
  if (n[0] + n[1] == 0) return 0.0;
  return polcomp::visibility(static_cast<double>(n[0]), static_cast<double>(n[1])).value;
}

double maximise_over_angles(PaddleController& c,
                            const std::function<double()>& score) {
  const std::size_t n = c.size();
  // Coarse lattice, then a compass search with shrinking steps.
  std::vector<double> best(c.angles());
  double best_score = score();
  const int grid = 18;
  std::vector<int> idx(n, 0);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) c.set_angle(i, kPi * idx[i] / grid);
    const double s = score();
    if (s > best_score) {
      best_score = s;
      best = c.angles();
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == grid) idx[k++] = 0;
    if (k == n) break;
  }
  for (std::size_t i = 0; i < n; ++i) c.set_angle(i, best[i]);

  for (double step = kPi / (2 * grid); step > 1e-9; step /= 2) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (double d : {step, -step}) {
          const double old = c.angle(i);
          c.set_angle(i, old + d);
          const double s = score();
          if (s > best_score) {
            best_score = s;
            improved = true;
          } else {
            c.set_angle(i, old);
          }
        }
      }
    }
  }
  return best_score;
}

std::vector<double> angles_deg(const PaddleController& c) {
  std::vector<double> out;
  out.reserve(c.size());
  for (double a : c.angles()) out.push_back(rad_to_deg(a));
  return out;
}

void fill_common(CompensationReport& r, const Actuator& act,
                 std::int64_t shots) {
  r.shots_used = shots;
  r.paddle_moves = act.moves;
  r.rotation_deg = act.rotation_deg;
  r.final_angles_deg = angles_deg(act.path().controller);
}

}  // namespace detail

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::manual:
      return "manual";
    case Method::mpc:
      return "mpc";
    case Method::blinking:
      return "blinking";
    case Method::qber_min:
      return "qber_min";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  for (Method m : {Method::manual, Method::mpc, Method::blinking, Method::qber_min})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

void CostModel::validate() const {
  if (!(readout_s >= 0.0) || !(move_s_per_deg >= 0.0) || !(human_overhead_s >= 0.0))
    throw InvalidArgument("CostModel: all costs must be >= 0");
}

CostModel CostModel::for_method(Method m) {
  switch (m) {
    case Method::manual:
      // 1 s count readout, a hand turns about 20 deg/s, and every choice of
      // paddle or basis costs the operator time to reconfigure and think.
      return {1.0, 0.05, 12.0};
    case Method::mpc:
      // Motorized paddles rotate slowly, about 4 deg/s.
      return {1.0, 0.25, 0.0};
    case Method::blinking:
      // One readout spans both 0.3 s shutter windows.
      return {0.6, 0.25, 0.0};
    case Method::qber_min:
      // 1 s acquisition of live coincidences, hand-turned paddles.
      return {1.0, 0.05, 2.0};
  }
  return {};
}

nlohmann::json CompensationReport::to_json() const {
  nlohmann::json j = {{"method", to_string(method)},
                      {"final_visibility_hv", final_visibility_hv},
                      {"final_visibility_da", final_visibility_da},
                      {"final_qber", nullptr},
                      {"shots_used", shots_used},
                      {"paddle_moves", paddle_moves},
                      {"rotation_deg", rotation_deg},
                      {"decisions", decisions},
                      {"modeled_time_s", modeled_time_s},
                      {"converged", converged},
                      {"service_suspended_s", service_suspended_s},
                      {"disrupts_network", disrupts_network},
                      {"final_angles_deg", final_angles_deg}};
  if (final_qber) j["final_qber"] = polcomp::to_json(*final_qber);
  return j;
}

std::string CompensationReport::csv_header() {
  return "method,seed,visibility_hv,visibility_da,qber,shots,moves,"
         "modeled_time_s,converged";
}

std::string CompensationReport::csv_row(std::uint64_t seed) const {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << to_string(method) << ',' << seed << ','
     << final_visibility_hv << ',' << final_visibility_da << ',';
  if (final_qber) os << final_qber->value;
  os << ',' << shots_used << ',' << paddle_moves << ',' << modeled_time_s << ','
     << (converged ? "true" : "false");
  return os.str();
}

double modeled_time(const CompensationReport& r, const CostModel& cost) {
  cost.validate();
  return static_cast<double>(r.shots_used) * cost.readout_s +
         r.rotation_deg * cost.move_s_per_deg +
         static_cast<double>(r.decisions) * cost.human_overhead_s;
}

void finalize_costs(CompensationReport& r, const CostModel& cost) {
  r.modeled_time_s = modeled_time(r, cost);
  r.disrupts_network = r.method != Method::qber_min;
  r.service_suspended_s = r.disrupts_network ? r.modeled_time_s : 0.0;
}

Estimate objective_canonical(const CompensatedPath& path, BasisLabel basis,
                             std::uint64_t seed, MeasurementMode mode,
                             double photons) {
  const MeasBasis b = MeasBasis::of(basis);
  const Unitary2 u = effective_unitary(path);
  if (mode == MeasurementMode::expectation) {
    const double n = photons * single_arm_probs(b.nominal(), u, b)[1];
    return {n, std::sqrt(n)};
  }
  const auto n = reference_counts(b.nominal(), u, b, photons, seed);
  const auto cross = static_cast<double>(n[1]);
  return {cross, std::sqrt(cross)};
}

double expected_visibility(const CompensatedPath& path, BasisLabel basis) {
  const MeasBasis b = MeasBasis::of(basis);
  const auto p = single_arm_probs(b.nominal(), effective_unitary(path), b);
  return p[0] - p[1];
}

TwoQubitState delivered_state(const CompensatedPath& pathA,
                              const CompensatedPath& pathB,
                              const SourceModel& src) {
  src.validate();
  return apply_local(effective_unitary(pathA), effective_unitary(pathB),
                     werner_state(src.werner_p));
}

double solve_controller(CompensatedPath& path, const Unitary2& target) {
  return detail::maximise_over_angles(path.controller, [&] {
    return effective_unitary(path).overlap(target);
  });
}

}  // namespace polcomp
