// Finds the drift width per hourly step that gives the target mean QBER
// standard deviation over a 10.8-day horizon.  The result is the value of
// kCalibratedDriftSigma and of [drift] sigma in scenarios/default.ini.
//
//   calibrate_drift [--target 0.006] [--trials 10] [--jobs 8]

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>

#include "polcomp/runner.hpp"

using namespace polcomp;

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the drift width against a QBER standard deviation"};
  double target = 0.006;
  double horizon = 10.8;
  int trials = 10;
  int jobs = 1;
  std::uint64_t seed = 7;
  app.add_option("--target", target, "Mean per-link QBER standard deviation");
  app.add_option("--horizon-days", horizon);
  app.add_option("--trials", trials);
  app.add_option("--seed", seed);
  app.add_option("--jobs", jobs);
  CLI11_PARSE(app, argc, argv);

  Scenario s;
  s.seed = seed;
  s.trials = trials;
  auto measure = [&](double sigma) {
    s.drift.sigma = sigma;
    return cmd_stability(s, horizon, {jobs}).mean_std;
  };

  // The spread grows roughly with sigma^2; iterate on log sigma.
  double lo = 1e-4, hi = 0.1;
  double sigma = 0.0;
  for (int it = 0; it < 40; ++it) {
    sigma = std::sqrt(lo * hi);
    const double m = measure(sigma);
    std::printf("sigma %.6f  mean std %.6f\n", sigma, m);
    if (std::abs(m - target) < 1e-6) break;
    (m > target ? hi : lo) = sigma;
  }
  std::printf("calibrated sigma %.4f\n", sigma);
  return 0;
}
