#pragma once

// Full-mesh topology, symmetric ITU channel pairing and controller
// accounting.

#include <nlohmann/json.hpp>

#include <string_view>
#include <utility>
#include <vector>

namespace polcomp {

inline constexpr int kCenterChannel = 34;
inline constexpr int kDemuxBand = 30;

using UserId = int;

struct NetworkTopology {
  std::vector<UserId> users;
  /// Unordered pairs stored as (lower, higher), lexicographic.
  std::vector<std::pair<UserId, UserId>> links;

  std::size_t degree(UserId u) const;
};

/// Channel pair for one link.  The lower-id user receives `itu_high`.
struct ChannelPair {
  int itu_low = 0;
  int itu_high = 0;
};

struct ChannelPlan {
  int center = kCenterChannel;
  int band = kDemuxBand;
  /// Aligned with NetworkTopology::links.
  std::vector<ChannelPair> assignment;

  /// Channels delivered to `user`, ascending.
  std::vector<int> received_channels(const NetworkTopology& topo,
                                     UserId user) const;
};

/// Which family of compensation schemes a count refers to.  Every method
/// that uses an auxiliary reference laser needs a controller on each
/// fibre path; QBER minimisation needs one per link.
enum class ControllerScheme { canonical, qber_min };

std::string_view to_string(ControllerScheme s) noexcept;

NetworkTopology full_mesh(int n);

int pair_channel(int ch, int center = kCenterChannel);

ChannelPlan assign_channels(const NetworkTopology& topo,
                            int center = kCenterChannel,
                            int band = kDemuxBand);

int controllers_needed(int links, ControllerScheme scheme);

/// New compensation tasks triggered when user number `n` joins.
int growth_cost(int n, ControllerScheme scheme);

nlohmann::json plan_to_json(const NetworkTopology& topo,
                            const ChannelPlan& plan);

}  // namespace polcomp
