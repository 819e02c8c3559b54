#include "polcomp/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "polcomp/error.hpp"

namespace polcomp {

void DetectorRange::validate() const {
  DetectorModel lo{efficiency_min, jitter_min_ps, dark_rate_hz};
  DetectorModel hi{efficiency_max, jitter_max_ps, dark_rate_hz};
  lo.validate();
  hi.validate();
  if (efficiency_min > efficiency_max || jitter_min_ps > jitter_max_ps)
    throw InvalidArgument("DetectorRange: min above max");
}

DetectorModel DetectorRange::draw(Rng& rng) const {
  DetectorModel d;
  d.efficiency = efficiency_min + (efficiency_max - efficiency_min) * uniform01(rng);
  d.jitter_sigma_ps = jitter_min_ps + (jitter_max_ps - jitter_min_ps) * uniform01(rng);
  d.dark_rate_hz = dark_rate_hz;
  return d;
}

void Scenario::validate() const {
  auto check = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string(field) + ": " + what);
  };
  auto wrap = [](const char* field, const std::function<void()>& f) {
    try {
      f();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string(field) + ": " + e.what());
    }
  };
  check(users >= 2, "network.users", "need at least 2 users");
  check(trials >= 1, "network.trials", "need at least 1 trial");
  check(band >= 2, "network.band", "band must hold at least one channel pair");
  check(werner_jitter_pp >= 0.0 && werner_jitter_pp <= 10.0,
        "source.werner_jitter_pp", "must be in [0, 10]");
  check(loss_min_db >= 0.0 && loss_max_db >= loss_min_db, "links.loss_min_db",
        "need 0 <= loss_min_db <= loss_max_db");
  check(length_km > 0.0, "links.length_km", "must be > 0");
  check(max_skew_ps >= 0, "links.max_skew_ps", "must be >= 0");
  check(horizon_days > 0.0, "drift.horizon_days", "must be > 0");
  check(!methods.empty(), "methods.enabled", "at least one method required");
  check(simulate_duration_s > 0.0, "simulate.duration_s", "must be > 0");
  wrap("source", [&] { source.validate(); });
  wrap("detectors", [&] { detectors.validate(); });
  wrap("drift", [&] { drift.validate(); });
  wrap("manual", [&] { manual.validate(); });
  wrap("mpc", [&] { mpc.validate(); });
  wrap("blinking", [&] { blinking.validate(); });
  wrap("qber", [&] { qber.validate(); });
  for (const auto& [m, c] : costs)
    wrap(("cost_" + std::string(to_string(m))).c_str(), [&] { c.validate(); });
}

namespace {

std::string_view to_string(MeasurementMode m) {
  return m == MeasurementMode::sampled ? "sampled" : "expectation";
}

nlohmann::json cost_json(const CostModel& c) {
  return {{"readout_s", c.readout_s},
          {"move_s_per_deg", c.move_s_per_deg},
          {"human_overhead_s", c.human_overhead_s}};
}

}  // namespace

nlohmann::json Scenario::to_json() const {
  nlohmann::json methods_j = nlohmann::json::array();
  for (Method m : methods) methods_j.push_back(polcomp::to_string(m));
  nlohmann::json costs_j = nlohmann::json::object();
  for (const auto& [m, c] : costs) costs_j[std::string(polcomp::to_string(m))] = cost_json(c);
  return {
      {"seed", seed},
      {"users", users},
      {"trials", trials},
      {"center_channel", center_channel},
      {"band", band},
      {"source",
       {{"pair_rate_hz", source.pair_rate_hz},
        {"werner_p", source.werner_p},
        {"werner_jitter_pp", werner_jitter_pp}}},
      {"detectors",
       {{"efficiency_min", detectors.efficiency_min},
        {"efficiency_max", detectors.efficiency_max},
        {"jitter_min_ps", detectors.jitter_min_ps},
        {"jitter_max_ps", detectors.jitter_max_ps},
        {"dark_rate_hz", detectors.dark_rate_hz}}},
      {"links",
       {{"loss_min_db", loss_min_db},
        {"loss_max_db", loss_max_db},
        {"length_km", length_km},
        {"max_skew_ps", max_skew_ps}}},
      {"drift",
       {{"sigma", drift.sigma},
        {"step_interval_s", drift.step_interval_s},
        {"horizon_days", horizon_days}}},
      {"methods", methods_j},
      {"manual",
       {{"target_visibility", manual.target_visibility},
        {"max_alternations", manual.max_alternations},
        {"mode", to_string(manual.mode)}}},
      {"mpc",
       {{"initial_step_deg", mpc.initial_step_deg},
        {"threshold_hv", mpc.threshold_hv},
        {"threshold_da", mpc.threshold_da},
        {"threshold_global", mpc.threshold_global},
        {"runs_per_basis", mpc.runs_per_basis},
        {"threshold_reduction", mpc.threshold_reduction},
        {"max_basis_switches", mpc.max_basis_switches},
        {"reinclude_on_switch", mpc.reinclude_on_switch},
        {"mode", to_string(mpc.mode)}}},
      {"blinking",
       {{"integration_s", blinking.integration_s},
        {"sync_error", blinking.sync_error},
        {"target_global", blinking.target_global},
        {"max_windows", blinking.max_windows},
        {"mode", to_string(blinking.mode)}}},
      {"qber",
       {{"acquisition_s", qber.acquisition_s},
        {"bin_width_ps", qber.bin_width_ps},
        {"window_ps", qber.window_ps},
        {"target_qber", qber.target_qber},
        {"grid_search", qber.grid_search},
        {"mode", to_string(qber.mode)}}},
      {"costs", costs_j},
      {"simulate",
       {{"duration_s", simulate_duration_s},
        {"compensation",
         simulate_compensation == SimulateCompensation::ideal ? "ideal" : "none"}}},
      {"out_dir", out_dir.generic_string()}};
}

namespace {

using Setter = std::function<void(const std::string&)>;
using Section = std::map<std::string, Setter>;

struct BadValue {
  std::string why;
};

template <class T>
T number(const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty())
    throw BadValue{"'" + s + "' is not a valid number"};
  return v;
}

bool boolean(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw BadValue{"'" + s + "' is not a boolean"};
}

MeasurementMode mode(const std::string& s) {
  if (s == "sampled") return MeasurementMode::sampled;
  if (s == "expectation") return MeasurementMode::expectation;
  throw BadValue{"mode must be 'sampled' or 'expectation'"};
}

std::vector<Method> method_list(const std::string& s) {
  std::vector<Method> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    const std::string name = item.substr(b, e - b + 1);
    const auto m = parse_method(name);
    if (!m) throw BadValue{"unknown method '" + name + "'"};
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

template <class T>
Setter num(T& field) {
  return [&field](const std::string& s) { field = number<T>(s); };
}

Section cost_section(CostModel& c) {
  return {{"readout_s", num(c.readout_s)},
          {"move_s_per_deg", num(c.move_s_per_deg)},
          {"human_overhead_s", num(c.human_overhead_s)}};
}

std::map<std::string, Section> schema(Scenario& s) {
  std::map<std::string, Section> t;
  t["network"] = {{"seed", num(s.seed)},
                  {"users", num(s.users)},
                  {"trials", num(s.trials)},
                  {"center_channel", num(s.center_channel)},
                  {"band", num(s.band)},
                  {"out_dir", [&](const std::string& v) { s.out_dir = v; }}};
  t["source"] = {{"pair_rate_hz", num(s.source.pair_rate_hz)},
                 {"werner_p", num(s.source.werner_p)},
                 {"werner_jitter_pp", num(s.werner_jitter_pp)}};
  t["detectors"] = {{"efficiency_min", num(s.detectors.efficiency_min)},
                    {"efficiency_max", num(s.detectors.efficiency_max)},
                    {"jitter_min_ps", num(s.detectors.jitter_min_ps)},
                    {"jitter_max_ps", num(s.detectors.jitter_max_ps)},
                    {"dark_rate_hz", num(s.detectors.dark_rate_hz)}};
  t["links"] = {{"loss_min_db", num(s.loss_min_db)},
                {"loss_max_db", num(s.loss_max_db)},
                {"length_km", num(s.length_km)},
                {"max_skew_ps", num(s.max_skew_ps)}};
  t["drift"] = {{"sigma", num(s.drift.sigma)},
                {"step_interval_s", num(s.drift.step_interval_s)},
                {"horizon_days", num(s.horizon_days)}};
  t["methods"] = {{"enabled", [&](const std::string& v) { s.methods = method_list(v); }}};
  auto& m = s.manual;
  t["manual"] = {{"target_visibility", num(m.target_visibility)},
                 {"max_alternations", num(m.max_alternations)},
                 {"coarse_step_deg", num(m.coarse_step_deg)},
                 {"fine_step_deg", num(m.fine_step_deg)},
                 {"readout_photons", num(m.readout_photons)},
                 {"mode", [&](const std::string& v) { m.mode = mode(v); }}};
  auto& p = s.mpc;
  t["mpc"] = {{"initial_step_deg", num(p.initial_step_deg)},
              {"threshold_hv", num(p.threshold_hv)},
              {"threshold_da", num(p.threshold_da)},
              {"threshold_global", num(p.threshold_global)},
              {"runs_per_basis", num(p.runs_per_basis)},
              {"threshold_reduction", num(p.threshold_reduction)},
              {"max_basis_switches", num(p.max_basis_switches)},
              {"step_gain_deg", num(p.step_gain_deg)},
              {"min_step_deg", num(p.min_step_deg)},
              {"max_step_deg", num(p.max_step_deg)},
              {"refine_cycles", num(p.refine_cycles)},
              {"reinclude_on_switch",
               [&](const std::string& v) { p.reinclude_on_switch = boolean(v); }},
              {"readout_photons", num(p.readout_photons)},
              {"mode", [&](const std::string& v) { p.mode = mode(v); }}};
  auto& b = s.blinking;
  t["blinking"] = {{"integration_s", num(b.integration_s)},
                   {"transition_s", num(s.blinking_transition_s)},
                   {"target_global", num(b.target_global)},
                   {"max_windows", num(b.max_windows)},
                   {"coarse_step_deg", num(b.coarse_step_deg)},
                   {"fine_step_deg", num(b.fine_step_deg)},
                   {"restart_below", num(b.restart_below)},
                   {"mean_rate", num(b.mean_rate)},
                   {"mode", [&](const std::string& v) { b.mode = mode(v); }}};
  auto& q = s.qber;
  t["qber"] = {{"acquisition_s", num(q.acquisition_s)},
               {"bin_width_ps", num(q.bin_width_ps)},
               {"window_ps", num(q.window_ps)},
               {"max_offset_ps", num(q.max_offset_ps)},
               {"min_confidence", num(q.min_confidence)},
               {"target_qber", num(q.target_qber)},
               {"target_sigmas", num(q.target_sigmas)},
               {"max_sweeps", num(q.max_sweeps)},
               {"scan_points", num(q.scan_points)},
               {"grid_search", [&](const std::string& v) { q.grid_search = boolean(v); }},
               {"grid_step_deg", num(q.grid_step_deg)},
               {"mode", [&](const std::string& v) { q.mode = mode(v); }}};
  for (Method meth : {Method::manual, Method::mpc, Method::blinking, Method::qber_min})
    t["cost_" + std::string(to_string(meth))] = cost_section(s.costs[meth]);
  t["simulate"] = {
      {"duration_s", num(s.simulate_duration_s)},
      {"compensation", [&](const std::string& v) {
         if (v == "ideal")
           s.simulate_compensation = SimulateCompensation::ideal;
         else if (v == "none")
           s.simulate_compensation = SimulateCompensation::none;
         else
           throw BadValue{"compensation must be 'ideal' or 'none'"};
       }}};
  return t;
}

}  // namespace

Scenario parse_scenario(std::istream& is, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  Scenario s;
  auto table = schema(s);
  for (const auto& [section, body] : tree) {
    if (body.empty())
      throw ConfigError(origin + ": key '" + section + "' outside any section");
    const auto sec = table.find(section);
    if (sec == table.end())
      throw ConfigError(origin + ": unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      const auto f = sec->second.find(key);
      if (f == sec->second.end())
        throw ConfigError(origin + ": [" + section + "] unknown key '" + key + "'");
      try {
        f->second(node.data());
      } catch (const BadValue& e) {
        throw ConfigError(origin + ": [" + section + "] " + key + ": " + e.why);
      }
    }
  }
  // The leakage of blinking windows follows from the transition time.
  if (!(s.blinking_transition_s >= 0.0) || !(s.blinking.integration_s > 0.0))
    throw ConfigError(origin + ": [blinking] integration_s and transition_s must be "
                      "positive");
  s.blinking.sync_error =
      sync_error_from_transition(s.blinking_transition_s, s.blinking.integration_s);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  return parse_scenario(in, path.string());
}

}  // namespace polcomp
