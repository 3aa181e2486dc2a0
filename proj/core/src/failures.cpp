#include "rwres/failures.hpp"

#include <string>

#include "rwres/errors.hpp"

namespace rwres {

std::string_view to_string(ByzState state) {
  return state == ByzState::byz ? "byz" : "no_byz";
}

ByzState parse_byz_state(std::string_view name) {
  if (name == "byz") return ByzState::byz;
  if (name == "no_byz") return ByzState::no_byz;
  throw ConfigError("unknown byzantine state '" + std::string(name) + "'");
}

void FailurePlan::validate(int n) const {
  for (std::size_t i = 0; i < bursts.size(); ++i) {
    if (bursts[i].count < 1) throw ConfigError("failures: burst count must be >= 1");
    if (bursts[i].t < 1) throw ConfigError("failures: burst time must be >= 1");
    if (i > 0 && bursts[i].t <= bursts[i - 1].t)
      throw ConfigError("failures: burst times must be strictly increasing");
  }
  if (!(p_fail >= 0.0 && p_fail < 1.0)) throw ConfigError("failures: p_fail must lie in [0, 1)");
  if (byzantine) {
    if (byzantine->node < 0 || byzantine->node >= n)
      throw ConfigError("failures: byzantine node out of range");
    if (!(byzantine->p_transit >= 0.0 && byzantine->p_transit <= 1.0))
      throw ConfigError("failures: p_transit must lie in [0, 1]");
    const auto& sched = byzantine->schedule_override;
    for (std::size_t i = 1; i < sched.size(); ++i)
      if (sched[i].first <= sched[i - 1].first)
        throw ConfigError("failures: schedule_override times must be strictly increasing");
  }
}

namespace {

void kill(WalkToken& w, TimeStep t) {
  w.active = false;
  w.died_at = t;
}

}  // namespace

std::vector<std::size_t> apply_probabilistic(std::span<WalkToken> walks, double p_fail,
                                             TimeStep t, Rng& rng) {
  if (!(p_fail >= 0.0 && p_fail < 1.0))
    throw std::invalid_argument("apply_probabilistic: p_fail must lie in [0, 1)");
  std::vector<std::size_t> killed;
  if (p_fail == 0.0) return killed;
  for (std::size_t i = 0; i < walks.size(); ++i) {
    if (walks[i].active && rng.bernoulli(p_fail)) {
      kill(walks[i], t);
      killed.push_back(i);
    }
  }
  return killed;
}

std::vector<std::size_t> apply_burst(std::span<WalkToken> walks, int count, TimeStep t,
                                     Rng& rng) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < walks.size(); ++i)
    if (walks[i].active) pool.push_back(i);
  const std::size_t victims = std::min(pool.size(), static_cast<std::size_t>(std::max(count, 0)));
  std::vector<std::size_t> killed;
  killed.reserve(victims);
  // Partial Fisher-Yates.
  for (std::size_t k = 0; k < victims; ++k) {
    const std::size_t j = k + rng.index(pool.size() - k);
    std::swap(pool[k], pool[j]);
    kill(walks[pool[k]], t);
    killed.push_back(pool[k]);
  }
  return killed;
}

ByzState byzantine_step(ByzState current, double p_transit, Rng& rng) {
  if (p_transit <= 0.0) return current;
  if (p_transit >= 1.0 || rng.bernoulli(p_transit))
    return current == ByzState::byz ? ByzState::no_byz : ByzState::byz;
  return current;
}

std::vector<std::size_t> absorb_at_byzantine(std::span<WalkToken> walks, NodeId byz_node,
                                             TimeStep t) {
  std::vector<std::size_t> killed;
  for (std::size_t i = 0; i < walks.size(); ++i) {
    if (walks[i].active && walks[i].position == byz_node) {
      kill(walks[i], t);
      killed.push_back(i);
    }
  }
  return killed;
}

}  // namespace rwres
