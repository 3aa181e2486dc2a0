#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rwres/rng.hpp"
#include "rwres/walk.hpp"

namespace rwres {

enum class ByzState { no_byz, byz };

std::string_view to_string(ByzState state);
ByzState parse_byz_state(std::string_view name);

/// Placeholder transition probability for the Byzantine two-state chain;
/// the value used for the published Byzantine experiment is unknown.
inline constexpr double kDefaultByzTransit = 0.0005;

struct Burst {
  TimeStep t = 0;
  int count = 1;
};

struct ByzantineConfig {
  NodeId node = 0;
  double p_transit = kDefaultByzTransit;
  ByzState initial_state = ByzState::no_byz;
  /// Steps at which the state is forced instead of drawn from the chain.
  std::vector<std::pair<TimeStep, ByzState>> schedule_override;
};

struct FailurePlan {
  std::vector<Burst> bursts;
  double p_fail = 0.0;
  std::optional<ByzantineConfig> byzantine;

  /// Throws ConfigError. `n` is the node count, used to range-check the
  /// Byzantine node.
  void validate(int n) const;

  bool any() const { return !bursts.empty() || p_fail > 0.0 || byzantine.has_value(); }
};

/// Deactivates each active walk independently with probability p_fail.
/// Returns the indices of killed walks in ascending order.
std::vector<std::size_t> apply_probabilistic(std::span<WalkToken> walks, double p_fail,
                                             TimeStep t, Rng& rng);

/// Deactivates min(count, active) walks chosen uniformly without
/// replacement. Returns killed indices in the order they were drawn.
std::vector<std::size_t> apply_burst(std::span<WalkToken> walks, int count, TimeStep t,
                                     Rng& rng);

/// One transition of the symmetric two-state chain.
ByzState byzantine_step(ByzState current, double p_transit, Rng& rng);

/// Kills every active walk currently positioned at the Byzantine node.
std::vector<std::size_t> absorb_at_byzantine(std::span<WalkToken> walks, NodeId byz_node,
                                             TimeStep t);

}  // namespace rwres
