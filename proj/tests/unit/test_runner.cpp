#include "doctest.h"

#include <atomic>
#include <set>
#include <sstream>

#include "polcomp/error.hpp"
#include "polcomp/runner.hpp"

using namespace polcomp;

namespace {

Scenario small() {
  Scenario s;
  s.users = 3;
  s.trials = 2;
  return s;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw InvalidArgument("six");
                               }),
                  InvalidArgument);
}

TEST_CASE("plan counts controllers and refuses a full band") {
  const auto j = cmd_plan(Scenario{});
  CHECK(j.at("schema") == "polcomp.plan/1");
  CHECK(j.at("links").size() == 6);
  Scenario s;
  s.users = 8;
  CHECK_THROWS_AS(cmd_plan(s), ChannelExhausted);
}

TEST_CASE("networks are reproducible and well formed") {
  const Scenario s = small();
  const Network a = build_network(s, 1);
  const Network b = build_network(s, 1);
  CHECK(a.paths.size() == 2 * a.topo.links.size());
  CHECK(a.user_paths.size() == 3);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].link.birefringence.matrix() == b.paths[i].link.birefringence.matrix());
    CHECK(ids.insert(a.paths[i].link.id).second);
  }
  for (double l : a.link_loss_db) {
    CHECK(l >= s.loss_min_db);
    CHECK(l <= s.loss_max_db);
  }
  CHECK(trial_seed(s, 0) != trial_seed(s, 1));
}

TEST_CASE("compare output does not depend on the thread count") {
  Scenario s = small();
  s.methods = {Method::mpc, Method::qber_min};
  const auto one = cmd_compare(s, {1});
  const auto four = cmd_compare(s, {4});
  CHECK(one.to_csv() == four.to_csv());
  CHECK(one.links_csv() == four.links_csv());
  CHECK(one.to_json() == four.to_json());
  CHECK(one.to_json().at("schema") == "polcomp.compare/1");
  CHECK(one.network_qber.size() == static_cast<std::size_t>(s.trials) * 3);
}

TEST_CASE("stability without drift is flat") {
  Scenario s = small();
  s.trials = 1;
  s.drift.sigma = 0.0;
  const auto r = cmd_stability(s, 1.0);
  CHECK(r.steps == 24);
  for (const auto& t : r.traces) CHECK(t.std_dev == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.mean_std == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("simulated links sit near the source floor") {
  Scenario s = small();
  s.simulate_duration_s = 2.0;
  const auto r = cmd_simulate(s);
  REQUIRE(r.links.size() == 3);
  for (const auto& l : r.links) {
    CHECK(std::abs(l.qber.value - l.expected_qber) < 4 * l.qber.std_error + 0.002);
    CHECK(l.delay.confidence >= s.qber.min_confidence);
  }
}

TEST_CASE("summary statistics") {
  const auto e = mean_and_stderr({1.0, 2.0, 3.0});
  CHECK(e.value == doctest::Approx(2.0));
  CHECK(e.std_error == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(sample_std({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
}

}
