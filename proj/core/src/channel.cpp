#include "polcomp/channel.hpp"

#include <cmath>
#include <random>

#include "polcomp/error.hpp"

namespace polcomp {

void FibreLink::validate() const {
  if (!(loss_db >= 0.0))
    throw InvalidArgument("FibreLink " + id + ": loss_db must be >= 0");
  if (!(length_km > 0.0))
    throw InvalidArgument("FibreLink " + id + ": length_km must be > 0");
  if (!is_unitary(birefringence.matrix()))
    throw InvalidArgument("FibreLink " + id + ": birefringence not unitary");
  if (!(drift_sigma >= 0.0))
    throw InvalidArgument("FibreLink " + id + ": drift_sigma must be >= 0");
}

void DriftProcess::validate() const {
  if (!(sigma >= 0.0)) throw InvalidArgument("DriftProcess: sigma must be >= 0");
  if (!(step_interval_s > 0.0))
    throw InvalidArgument("DriftProcess: step_interval_s must be > 0");
}

std::string_view to_string(ControllerSide s) noexcept {
  return s == ControllerSide::receiver ? "receiver" : "source";
}

FibreLink make_link(std::string id, double loss_db, std::uint64_t seed,
                    double length_km) {
  Rng rng = make_rng(seed, 0x6c696e6bULL);
  FibreLink link{std::move(id), length_km, loss_db, haar_unitary(rng), 0.0};
  link.validate();
  return link;
}

FibreLink step_drift(const FibreLink& link, const DriftProcess& process,
                     std::uint64_t step_index) {
  process.validate();
  if (process.sigma == 0.0) return link;

  Rng rng = make_rng(process.rng_seed, step_index);
  std::normal_distribution<double> g;
  std::array<double, 3> axis{};
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : axis) {
      x = g(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-12);
  const double eps = std::abs(g(rng)) * process.sigma;

  FibreLink out = link;
  out.birefringence = su2_rotation(axis, eps) * link.birefringence;
  return out;
}

Unitary2 effective_unitary(const CompensatedPath& path) {
  const Unitary2 p = paddle_unitary(path.controller);
  return path.side == ControllerSide::receiver ? p * path.link.birefringence
                                               : path.link.birefringence * p;
}

double transmission_probability(double loss_db) {
  if (!(loss_db >= 0.0))
    throw InvalidArgument("transmission_probability: loss must be >= 0 dB");
  return std::pow(10.0, -loss_db / 10.0);
}

double transmission_probability(const FibreLink& link) {
  return transmission_probability(link.loss_db);
}

}  // namespace polcomp
