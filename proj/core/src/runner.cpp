#include "polcomp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "polcomp/error.hpp"
#include "polcomp/tagio.hpp"

namespace polcomp {

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads =
      static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // Report the first failure in task order, independent of scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

nlohmann::json cmd_plan(const Scenario& s) {
  const NetworkTopology topo = full_mesh(s.users);
  return plan_to_json(topo, assign_channels(topo, s.center_channel, s.band));
}

namespace {

std::string user_name(UserId u) { return "u" + std::to_string(u); }

std::string link_name(const NetworkTopology& t, std::size_t i) {
  return user_name(t.links[i].first) + "-" + user_name(t.links[i].second);
}

// Seed streams inside one trial.
constexpr std::uint64_t kLossStream = 1;
constexpr std::uint64_t kWernerStream = 2;
constexpr std::uint64_t kDetectorStream = 3;
constexpr std::uint64_t kPathStream = 0x1000;
constexpr std::uint64_t kUserStream = 0x2000;
constexpr std::uint64_t kDriftStream = 0x3000;
constexpr std::uint64_t kSimulateStream = 0x4000;
constexpr std::uint64_t kMethodStream = 0x100000;

std::uint64_t method_seed(std::uint64_t ts, Method m, std::size_t idx) {
  return derive_seed(ts, kMethodStream * (static_cast<std::uint64_t>(m) + 1) + idx);
}

std::int64_t fibre_delay_ps(const FibreLink& l) {
  return static_cast<std::int64_t>(std::llround(l.length_km * kFibreDelayPsPerKm));
}

std::string fixed(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::uint64_t trial_seed(const Scenario& s, int trial) {
  return derive_seed(s.seed, static_cast<std::uint64_t>(trial));
}

Network build_network(const Scenario& s, int trial) {
  const std::uint64_t ts = trial_seed(s, trial);
  Network net;
  net.topo = full_mesh(s.users);
  const std::size_t k = net.topo.links.size();
  const auto n = static_cast<std::size_t>(s.users);

  Rng loss_rng = make_rng(ts, kLossStream);
  auto draw_loss = [&] {
    return s.loss_min_db + (s.loss_max_db - s.loss_min_db) * uniform01(loss_rng);
  };
  for (std::size_t i = 0; i < k; ++i) net.link_loss_db.push_back(draw_loss());
  std::vector<double> user_loss;
  for (std::size_t u = 0; u < n; ++u) user_loss.push_back(draw_loss());

  // The imperfection shifts the QBER floor (1 - p) / 2 by up to +-jitter.
  Rng werner_rng = make_rng(ts, kWernerStream);
  for (std::size_t i = 0; i < k; ++i) {
    const double shift = s.werner_jitter_pp / 100.0 * (2.0 * uniform01(werner_rng) - 1.0);
    net.link_werner_p.push_back(std::clamp(s.source.werner_p - 2.0 * shift, 0.0, 1.0));
  }

  Rng det_rng = make_rng(ts, kDetectorStream);
  for (std::size_t u = 0; u < n; ++u) {
    net.detectors.push_back(s.detectors.draw(det_rng));
    net.skew_ps.push_back(static_cast<std::int64_t>(
        std::floor(uniform01(det_rng) * static_cast<double>(s.max_skew_ps + 1))));
  }

  // Each photon of a link crosses half of the link's loss.
  for (std::size_t i = 0; i < k; ++i) {
    const auto [a, b] = net.topo.links[i];
    for (std::size_t e = 0; e < 2; ++e) {
      CompensatedPath p;
      p.link = make_link(link_name(net.topo, i) + ":" + user_name(e == 0 ? a : b),
                         net.link_loss_db[i] / 2.0, derive_seed(ts, kPathStream + 2 * i + e),
                         s.length_km);
      p.side = ControllerSide::receiver;
      net.paths.push_back(std::move(p));
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    CompensatedPath p;
    p.link = make_link(user_name(static_cast<UserId>(u)), user_loss[u] / 2.0,
                       derive_seed(ts, kUserStream + u), s.length_km);
    p.side = ControllerSide::source;
    net.user_paths.push_back(std::move(p));
  }
  return net;
}

SourceModel link_source(const Scenario& s, const Network& net, std::size_t link) {
  SourceModel src = s.source;
  src.werner_p = net.link_werner_p.at(link);
  return src;
}

// ---- compare --------------------------------------------------------------

Estimate mean_and_stderr(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  return {mean, sample_std(v) / std::sqrt(static_cast<double>(v.size()))};
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

std::size_t link_index(const NetworkTopology& t, UserId a, UserId b) {
  if (a > b) std::swap(a, b);
  for (std::size_t i = 0; i < t.links.size(); ++i)
    if (t.links[i] == std::pair{a, b}) return i;
  throw InvalidArgument("no link between users");
}

MethodSummary summarise(Method m, const std::vector<const LinkRecord*>& recs) {
  MethodSummary row;
  row.method = m;
  row.count = static_cast<int>(recs.size());
  std::vector<double> vis, contrib, fid, q, shots, time;
  for (const LinkRecord* r : recs) {
    const CompensationReport& rep = r->report;
    row.converged += rep.converged ? 1 : 0;
    row.disrupts_network = rep.disrupts_network;
    vis.push_back(rep.mean_visibility());
    shots.push_back(static_cast<double>(rep.shots_used));
    time.push_back(rep.modeled_time_s);
    if (m == Method::qber_min) {
      contrib.push_back(r->polarization_qber);
      const double qv = rep.final_qber ? std::clamp(rep.final_qber->value, 0.0, 0.5) : 0.5;
      q.push_back(qv);
      fid.push_back(fidelity_from_qber(qv));
    } else {
      const double c = qber_contribution(std::clamp(rep.mean_visibility(), 0.0, 1.0));
      contrib.push_back(c);
      fid.push_back(estimated_fidelity(std::min(c, 0.5 - kBaselineOtherQber)));
    }
  }
  row.visibility = mean_and_stderr(vis);
  row.qber_contribution = mean_and_stderr(contrib);
  row.fidelity = mean_and_stderr(fid);
  row.fidelity_measured = m == Method::qber_min;
  if (m == Method::qber_min) row.qber = mean_and_stderr(q);
  row.shots = mean_and_stderr(shots);
  row.modeled_time_s = mean_and_stderr(time);
  return row;
}

}  // namespace

Comparison cmd_compare(const Scenario& s, const RunOptions& opt) {
  s.validate();
  std::vector<Network> nets;
  for (int t = 0; t < s.trials; ++t) nets.push_back(build_network(s, t));

  // The reference user's fibre is aligned before the others are matched
  // to it.
  std::vector<CompensatedPath> refs;
  for (const Network& net : nets) {
    CompensatedPath ref = net.user_paths[0];
    solve_controller(ref, Unitary2::identity());
    refs.push_back(ref);
  }

  struct Task {
    Method method;
    int trial;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (Method m : s.methods)
    for (int t = 0; t < s.trials; ++t) {
      const Network& net = nets[static_cast<std::size_t>(t)];
      if (m == Method::qber_min) {
        for (std::size_t u = 1; u < net.user_paths.size(); ++u) tasks.push_back({m, t, u});
      } else {
        for (std::size_t i = 0; i < net.paths.size(); ++i) tasks.push_back({m, t, i});
      }
    }

  std::vector<LinkRecord> records(tasks.size());
  std::vector<CompensatedPath> final_paths(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t k) {
    const Task& task = tasks[k];
    const Network& net = nets[static_cast<std::size_t>(task.trial)];
    const std::uint64_t seed =
        method_seed(trial_seed(s, task.trial), task.method, task.index);
    const CostModel& cost = s.costs.at(task.method);
    LinkRecord& rec = records[k];
    rec.method = task.method;
    rec.trial = task.trial;
    rec.seed = seed;
    switch (task.method) {
      case Method::manual:
      case Method::mpc:
      case Method::blinking: {
        CompensatedPath p = net.paths[task.index];
        rec.path_id = p.link.id;
        if (task.method == Method::manual)
          rec.report = compensate_manual(p, s.manual, cost, seed);
        else if (task.method == Method::mpc)
          rec.report = compensate_mpc(p, s.mpc, cost, seed);
        else
          rec.report = compensate_blinking(p, s.blinking, cost, seed);
        final_paths[k] = std::move(p);
        break;
      }
      case Method::qber_min: {
        const std::size_t u = task.index;
        CompensatedPath p = net.user_paths[u];
        const CompensatedPath& ref = refs[static_cast<std::size_t>(task.trial)];
        const std::size_t li = link_index(net.topo, 0, static_cast<UserId>(u));
        const SourceModel src = link_source(s, net, li);
        QberConfig cfg = s.qber;
        cfg.detector_a = net.detectors[u];
        cfg.detector_b = net.detectors[0];
        cfg.skew_b_ps = net.skew_ps[0] - net.skew_ps[u];
        rec.path_id = p.link.id;
        rec.report = compensate_qber(p, ref, src, cfg, cost, seed);
        rec.polarization_qber =
            expected_qber(delivered_state(p, ref, src)) - (1.0 - src.werner_p) / 2.0;
        final_paths[k] = std::move(p);
        break;
      }
    }
  });

  Comparison c;
  c.links = records;
  for (Method m : s.methods) {
    std::vector<const LinkRecord*> recs;
    for (const LinkRecord& r : c.links)
      if (r.method == m) recs.push_back(&r);
    c.rows.push_back(summarise(m, recs));
  }

  // QBER of every logical link once all user fibres are compensated.
  if (std::find(s.methods.begin(), s.methods.end(), Method::qber_min) != s.methods.end()) {
    for (int t = 0; t < s.trials; ++t) {
      const Network& net = nets[static_cast<std::size_t>(t)];
      std::vector<CompensatedPath> users(net.user_paths.size());
      users[0] = refs[static_cast<std::size_t>(t)];
      for (std::size_t k = 0; k < tasks.size(); ++k)
        if (tasks[k].method == Method::qber_min && tasks[k].trial == t)
          users[tasks[k].index] = final_paths[k];
      for (std::size_t i = 0; i < net.topo.links.size(); ++i) {
        const auto [a, b] = net.topo.links[i];
        c.network_qber.push_back(expected_qber(
            delivered_state(users[static_cast<std::size_t>(a)],
                            users[static_cast<std::size_t>(b)], link_source(s, net, i))));
      }
    }
  }
  return c;
}

bool Comparison::all_converged() const {
  return std::all_of(links.begin(), links.end(),
                     [](const LinkRecord& r) { return r.report.converged; });
}

std::string Comparison::to_csv() const {
  std::ostringstream os;
  os << "method,paths,converged,visibility,visibility_stderr,qber_contribution,"
        "qber_contribution_stderr,fidelity,fidelity_stderr,fidelity_kind,qber,"
        "qber_stderr,shots,shots_stderr,modeled_time_s,modeled_time_stderr,"
        "disrupts_network\n";
  for (const MethodSummary& r : rows) {
    os << to_string(r.method) << ',' << r.count << ',' << r.converged << ','
       << fixed(r.visibility.value) << ',' << fixed(r.visibility.std_error) << ','
       << fixed(r.qber_contribution.value) << ',' << fixed(r.qber_contribution.std_error)
       << ',' << fixed(r.fidelity.value) << ',' << fixed(r.fidelity.std_error) << ','
       << (r.fidelity_measured ? "measured" : "estimated") << ',';
    if (r.qber) os << fixed(r.qber->value) << ',' << fixed(r.qber->std_error);
    else os << ',';
    os << ',' << fixed(r.shots.value, 2) << ',' << fixed(r.shots.std_error, 2) << ','
       << fixed(r.modeled_time_s.value, 2) << ',' << fixed(r.modeled_time_s.std_error, 2)
       << ',' << (r.disrupts_network ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string Comparison::links_csv() const {
  std::ostringstream os;
  os << "trial,path," << CompensationReport::csv_header() << '\n';
  for (const LinkRecord& r : links)
    os << r.trial << ',' << r.path_id << ',' << r.report.csv_row(r.seed) << '\n';
  return os.str();
}

nlohmann::json Comparison::to_json() const {
  using nlohmann::json;
  json rows_j = json::array();
  for (const MethodSummary& r : rows) {
    rows_j.push_back({{"method", to_string(r.method)},
                      {"paths", r.count},
                      {"converged", r.converged},
                      {"visibility", polcomp::to_json(r.visibility)},
                      {"qber_contribution", polcomp::to_json(r.qber_contribution)},
                      {"fidelity", polcomp::to_json(r.fidelity)},
                      {"fidelity_kind", r.fidelity_measured ? "measured" : "estimated"},
                      {"qber", r.qber ? polcomp::to_json(*r.qber) : json(nullptr)},
                      {"shots", polcomp::to_json(r.shots)},
                      {"modeled_time_s", polcomp::to_json(r.modeled_time_s)},
                      {"disrupts_network", r.disrupts_network}});
  }
  json links_j = json::array();
  for (const LinkRecord& r : links) {
    json j = r.report.to_json();
    j["trial"] = r.trial;
    j["path"] = r.path_id;
    j["seed"] = r.seed;
    links_j.push_back(std::move(j));
  }
  return {{"schema", "polcomp.compare/1"},
          {"rows", rows_j},
          {"links", links_j},
          {"network_qber", network_qber},
          {"all_converged", all_converged()}};
}

// ---- stability ------------------------------------------------------------

StabilityResult cmd_stability(const Scenario& s, double horizon_days,
                              const RunOptions& opt) {
  s.validate();
  if (!(horizon_days > 0.0))
    throw InvalidArgument("stability: horizon must be > 0 days");
  StabilityResult res;
  res.step_interval_s = s.drift.step_interval_s;
  res.steps = static_cast<int>(std::llround(horizon_days * 86400.0 / s.drift.step_interval_s));

  std::vector<Network> nets;
  for (int t = 0; t < s.trials; ++t) nets.push_back(build_network(s, t));
  struct Task {
    int trial;
    std::size_t link;
  };
  std::vector<Task> tasks;
  for (int t = 0; t < s.trials; ++t)
    for (std::size_t i = 0; i < nets[static_cast<std::size_t>(t)].topo.links.size(); ++i)
      tasks.push_back({t, i});

  res.traces.resize(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t k) {
    const Network& net = nets[static_cast<std::size_t>(tasks[k].trial)];
    const std::size_t i = tasks[k].link;
    const std::uint64_t ts = trial_seed(s, tasks[k].trial);
    CompensatedPath pa = net.paths[2 * i];
    CompensatedPath pb = net.paths[2 * i + 1];
    solve_controller(pa, Unitary2::identity());
    solve_controller(pb, Unitary2::identity());
    DriftProcess da = s.drift, db = s.drift;
    da.rng_seed = derive_seed(ts, kDriftStream + 2 * i);
    db.rng_seed = derive_seed(ts, kDriftStream + 2 * i + 1);
    const TwoQubitState source = werner_state(net.link_werner_p[i]);

    StabilityTrace& tr = res.traces[k];
    tr.trial = tasks[k].trial;
    tr.link_id = link_name(net.topo, i);
    for (int step = 0; step <= res.steps; ++step) {
      if (step > 0) {
        pa.link = step_drift(pa.link, da, static_cast<std::uint64_t>(step));
        pb.link = step_drift(pb.link, db, static_cast<std::uint64_t>(step));
      }
      tr.qber.push_back(expected_qber(
          apply_local(effective_unitary(pa), effective_unitary(pb), source)));
    }
    tr.std_dev = sample_std(tr.qber);
  });

  double sum = 0.0;
  for (const auto& tr : res.traces) sum += tr.std_dev;
  res.mean_std = res.traces.empty() ? 0.0 : sum / static_cast<double>(res.traces.size());
  return res;
}

std::string StabilityResult::trace_csv() const {
  std::ostringstream os;
  os << "trial,link,step,time_h,qber\n";
  for (const auto& tr : traces)
    for (std::size_t k = 0; k < tr.qber.size(); ++k)
      os << tr.trial << ',' << tr.link_id << ',' << k << ','
         << fixed(static_cast<double>(k) * step_interval_s / 3600.0, 3) << ','
         << fixed(tr.qber[k], 8) << '\n';
  return os.str();
}

nlohmann::json StabilityResult::to_json() const {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& tr : traces) {
    const auto [lo, hi] = std::minmax_element(tr.qber.begin(), tr.qber.end());
    links.push_back({{"trial", tr.trial},
                     {"link", tr.link_id},
                     {"qber_initial", tr.qber.front()},
                     {"qber_min", *lo},
                     {"qber_max", *hi},
                     {"qber_std", tr.std_dev}});
  }
  return {{"schema", "polcomp.stability/1"},
          {"step_interval_s", step_interval_s},
          {"steps", steps},
          {"mean_qber_std", mean_std},
          {"links", links}};
}

// ---- simulate -------------------------------------------------------------

SimulationResult cmd_simulate(const Scenario& s, const RunOptions& opt) {
  s.validate();
  Network net = build_network(s, 0);
  if (s.simulate_compensation == SimulateCompensation::ideal)
    for (CompensatedPath& p : net.user_paths) solve_controller(p, Unitary2::identity());

  const std::uint64_t ts = trial_seed(s, 0);
  SimulationResult res;
  res.links.resize(net.topo.links.size());
  parallel_for(res.links.size(), opt.jobs, [&](std::size_t i) {
    const auto [a, b] = net.topo.links[i];
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    const CompensatedPath& pa = net.user_paths[ua];
    const CompensatedPath& pb = net.user_paths[ub];
    const SourceModel src = link_source(s, net, i);
    const TwoQubitState rho = delivered_state(pa, pb, src);
    const Arm arm_a{net.detectors[ua], transmission_probability(pa.link),
                    fibre_delay_ps(pa.link) + net.skew_ps[ua]};
    const Arm arm_b{net.detectors[ub], transmission_probability(pb.link),
                    fibre_delay_ps(pb.link) + net.skew_ps[ub]};

    SimulatedLink& out = res.links[i];
    out.link_id = link_name(net.topo, i);
    out.seed = derive_seed(ts, kSimulateStream + i);
    out.expected_qber = expected_qber(rho);
    Acquisition acq = acquire_two_basis(src, rho, arm_a, arm_b, s.simulate_duration_s, out.seed);
    const CorrelationHistogram h = cross_correlate(acq.streams.a, acq.streams.b,
                                                   s.qber.bin_width_ps, s.qber.max_offset_ps);
    out.delay = find_delay(h, s.qber.min_confidence);
    out.tally = count_coincidences(acq.streams.a, acq.streams.b,
                                   std::llround(out.delay.offset_ps), s.qber.window_ps,
                                   acq.schedule);
    out.qber = out.tally.total() > 0 ? qber(out.tally) : Estimate{0.5, 0.5};
    out.streams = std::move(acq.streams);
    out.schedule = std::move(acq.schedule);
  });
  return res;
}

nlohmann::json SimulationResult::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : links) {
    nlohmann::json sched = nlohmann::json::array();
    for (const auto& iv : l.schedule.intervals)
      sched.push_back({{"begin_ps", iv.begin_ps},
                       {"end_ps", iv.end_ps},
                       {"basis", to_string(iv.basis)}});
    arr.push_back({{"link", l.link_id},
                   {"seed", l.seed},
                   {"tags_a", l.streams.a.tags.size()},
                   {"tags_b", l.streams.b.tags.size()},
                   {"delay_ps", l.delay.offset_ps},
                   {"delay_confidence", l.delay.confidence},
                   {"tally", l.tally.to_json()},
                   {"qber", polcomp::to_json(l.qber)},
                   {"expected_qber", l.expected_qber},
                   {"schedule", sched}});
  }
  return {{"schema", "polcomp.simulate/1"}, {"links", arr}};
}

// ---- output ---------------------------------------------------------------

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  write_text(p, j.dump(2) + "\n");
}

void write_plan(const std::filesystem::path& dir, const nlohmann::json& plan) {
  write_json(dir / "plan.json", plan);
}

void write_comparison(const std::filesystem::path& dir, const Comparison& c,
                      OutputFormat f) {
  if (f != OutputFormat::json) {
    write_text(dir / "compare.csv", c.to_csv());
    write_text(dir / "compare_links.csv", c.links_csv());
  }
  if (f != OutputFormat::csv) write_json(dir / "compare.json", c.to_json());
}

void write_stability(const std::filesystem::path& dir, const StabilityResult& r,
                     OutputFormat f) {
  if (f != OutputFormat::json) write_text(dir / "stability_trace.csv", r.trace_csv());
  if (f != OutputFormat::csv) write_json(dir / "stability.json", r.to_json());
}

void write_simulation(const std::filesystem::path& dir, const SimulationResult& r) {
  for (const auto& l : r.links) {
    const auto users = l.link_id.find('-');
    const std::string ua = l.link_id.substr(0, users);
    const std::string ub = l.link_id.substr(users + 1);
    std::filesystem::create_directories(dir / "streams");
    save_stream(dir / "streams" / (l.link_id + "_" + ua + ".ptag"), l.streams.a, l.seed);
    save_stream(dir / "streams" / (l.link_id + "_" + ub + ".ptag"), l.streams.b, l.seed);
  }
  write_json(dir / "simulate.json", r.to_json());
}

}  // namespace polcomp
