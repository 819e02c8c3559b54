// polcomp: scenario runner for polarization compensation experiments.
//
//   polcomp plan      --scenario s.ini
//   polcomp compare   --scenario s.ini --jobs 8
//   polcomp stability --scenario s.ini --horizon-days 10.8
//   polcomp simulate  --scenario s.ini --out dumps

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "polcomp/error.hpp"
#include "polcomp/runner.hpp"

using namespace polcomp;

namespace {

struct Args {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 1;
  std::optional<std::string> format;
  std::optional<double> horizon_days;
};

OutputFormat output_format(const Args& a) {
  if (!a.format) return OutputFormat::both;
  return *a.format == "json" ? OutputFormat::json : OutputFormat::csv;
}

Scenario scenario_from(const Args& a) {
  Scenario s = a.scenario.empty() ? Scenario{} : load_scenario(a.scenario);
  if (a.seed) s.seed = *a.seed;
  if (a.out) s.out_dir = *a.out;
  s.validate();
  return s;
}

int run_plan(const Args& a) {
  const Scenario s = scenario_from(a);
  const nlohmann::json plan = cmd_plan(s);
  write_plan(s.out_dir, plan);
  std::cout << plan.dump(2) << '\n';
  return kExitOk;
}

int run_compare(const Args& a) {
  const Scenario s = scenario_from(a);
  const Comparison c = cmd_compare(s, {a.jobs});
  const OutputFormat f = output_format(a);
  write_comparison(s.out_dir, c, f);
  if (f == OutputFormat::json)
    std::cout << c.to_json()["rows"].dump(2) << '\n';
  else
    std::cout << c.to_csv();
  if (!c.all_converged()) {
    int failed = 0;
    for (const auto& r : c.links) failed += r.report.converged ? 0 : 1;
    std::cerr << "polcomp: " << failed << " of " << c.links.size()
              << " compensations did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int run_stability(const Args& a) {
  const Scenario s = scenario_from(a);
  const double horizon = a.horizon_days.value_or(s.horizon_days);
  const StabilityResult r = cmd_stability(s, horizon, {a.jobs});
  const OutputFormat f = output_format(a);
  write_stability(s.out_dir, r, f);
  if (f == OutputFormat::json) {
    std::cout << r.to_json().dump(2) << '\n';
  } else {
    std::cout << "trial,link,qber_initial,qber_std\n";
    for (const auto& t : r.traces)
      std::cout << t.trial << ',' << t.link_id << ',' << t.qber.front() << ','
                << t.std_dev << '\n';
    std::cout << "mean_qber_std," << r.mean_std << '\n';
  }
  return kExitOk;
}

int run_simulate(const Args& a) {
  const Scenario s = scenario_from(a);
  const SimulationResult r = cmd_simulate(s, {a.jobs});
  write_simulation(s.out_dir, r);
  std::cout << "link,tags_a,tags_b,delay_ps,coincidences,qber,expected_qber\n";
  for (const auto& l : r.links)
    std::cout << l.link_id << ',' << l.streams.a.tags.size() << ','
              << l.streams.b.tags.size() << ',' << l.delay.offset_ps << ','
              << l.tally.total() << ',' << l.qber.value << ',' << l.expected_qber
              << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization compensation experiments for entanglement networks"};
  app.require_subcommand(1);
  Args args;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", args.scenario, "Scenario INI file (defaults if omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "Override the scenario seed");
    sub->add_option("--out", args.out, "Output directory");
    sub->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", args.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* plan = app.add_subcommand("plan", "Topology, channel plan and controller counts");
  auto* compare = app.add_subcommand("compare", "Compare the compensation methods");
  auto* stability = app.add_subcommand("stability", "Drift of compensated links");
  auto* simulate = app.add_subcommand("simulate", "Dump PTAG1 tag streams per link");
  for (auto* sub : {plan, compare, stability, simulate}) common(sub);
  stability->add_option("--horizon-days", args.horizon_days, "Modeled duration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*plan) return run_plan(args);
    if (*compare) return run_compare(args);
    if (*stability) return run_stability(args);
    return run_simulate(args);
  } catch (const ConfigError& e) {
    std::cerr << "polcomp: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ChannelExhausted& e) {
    std::cerr << "polcomp: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "polcomp: invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DelayNotFound& e) {
    std::cerr << "polcomp: " << e.what() << '\n';
    return kExitDelayNotFound;
  } catch (const std::exception& e) {
    std::cerr << "polcomp: " << e.what() << '\n';
    return 1;
  }
}
