#include "polcomp/netplan.hpp"

#include <algorithm>

#include "polcomp/error.hpp"

namespace polcomp {

std::size_t NetworkTopology::degree(UserId u) const {
  return static_cast<std::size_t>(
      std::count_if(links.begin(), links.end(), [u](const auto& l) {
        return l.first == u || l.second == u;
      }));
}

std::string_view to_string(ControllerScheme s) noexcept {
  return s == ControllerScheme::canonical ? "canonical" : "qber_min";
}

NetworkTopology full_mesh(int n) {
  if (n < 2)
    throw InvalidArgument("full_mesh: need at least 2 users, got " +
                          std::to_string(n));
  NetworkTopology t;
  for (int u = 0; u < n; ++u) t.users.push_back(u);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) t.links.emplace_back(a, b);
  return t;
}

int pair_channel(int ch, int center) {
  if (ch == center)
    throw InvalidArgument("pair_channel: channel " + std::to_string(ch) +
                          " is the degenerate centre channel");
  return 2 * center - ch;
}

ChannelPlan assign_channels(const NetworkTopology& topo, int center,
                            int band) {
  const int required = 2 * static_cast<int>(topo.links.size());
  if (required > band) throw ChannelExhausted(required, band);
  ChannelPlan plan;
  plan.center = center;
  plan.band = band;
  for (std::size_t k = 1; k <= topo.links.size(); ++k) {
    const int lo = center - static_cast<int>(k);
    plan.assignment.push_back({lo, pair_channel(lo, center)});
  }
  return plan;
}

std::vector<int> ChannelPlan::received_channels(const NetworkTopology& topo,
                                                UserId user) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < topo.links.size() && i < assignment.size();
       ++i) {
    const auto& [a, b] = topo.links[i];
    if (a == user) out.push_back(assignment[i].itu_high);
    if (b == user) out.push_back(assignment[i].itu_low);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int controllers_needed(int links, ControllerScheme scheme) {
  if (links < 0) throw InvalidArgument("controllers_needed: negative count");
  return scheme == ControllerScheme::canonical ? 2 * links : links;
}

int growth_cost(int n, ControllerScheme scheme) {
  if (n < 2) throw InvalidArgument("growth_cost: user index must be >= 2");
  // Each new logical link is two fibre paths for the reference-laser schemes.
  return scheme == ControllerScheme::canonical ? 2 * (n - 1) : 1;
}

nlohmann::json plan_to_json(const NetworkTopology& topo,
                            const ChannelPlan& plan) {
  using nlohmann::json;
  json links = json::array();
  for (std::size_t i = 0; i < topo.links.size(); ++i) {
    const auto& [a, b] = topo.links[i];
    links.push_back({{"users", {a, b}},
                     {"itu_low", plan.assignment[i].itu_low},
                     {"itu_high", plan.assignment[i].itu_high}});
  }
  json users = json::array();
  for (UserId u : topo.users)
    users.push_back({{"id", u}, {"channels", plan.received_channels(topo, u)}});
  const int k = static_cast<int>(topo.links.size());
  json growth = json::array();
  for (int n = 2; n <= 12; ++n)
    growth.push_back({{"user", n},
                      {"canonical", growth_cost(n, ControllerScheme::canonical)},
                      {"qber_min", growth_cost(n, ControllerScheme::qber_min)}});
  return {{"schema", "polcomp.plan/1"},
          {"center_channel", plan.center},
          {"band", plan.band},
          {"users", users},
          {"links", links},
          {"controllers_needed",
           {{"canonical", controllers_needed(k, ControllerScheme::canonical)},
            {"qber_min", controllers_needed(k, ControllerScheme::qber_min)}}},
          {"growth_cost", growth}};
}

}  // namespace polcomp
