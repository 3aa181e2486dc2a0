#include "rwres/engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rwres/errors.hpp"

namespace rwres {

std::string_view to_string(Placement placement) {
  return placement == Placement::single_node ? "single_node" : "random_nodes";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::fork: return "fork";
    case EventKind::terminate: return "terminate";
    case EventKind::prob_fail: return "prob_fail";
    case EventKind::burst_fail: return "burst_fail";
    case EventKind::byz_kill: return "byz_kill";
  }
  return "unknown";
}

Placement parse_placement(std::string_view name) {
  if (name == "single_node") return Placement::single_node;
  if (name == "random_nodes") return Placement::random_nodes;
  throw ConfigError("unknown placement '" + std::string(name) + "'");
}

Simulation::Simulation(std::shared_ptr<const Graph> graph, PolicyConfig policy,
                       FailurePlan failures, SimOptions options)
    : graph_(std::move(graph)),
      policy_(policy),
      failures_(std::move(failures)),
      options_(options),
      rng_(options.seed) {
  if (!graph_) throw ConfigError("simulation: graph is required");
  if (options_.z0 < 1) throw ConfigError("simulation: z0 must be >= 1");
  if (policy_.z0 != options_.z0) throw ConfigError("simulation: policy z0 differs from z0");
  policy_.validate();
  failures_.validate(graph_->size());

  const int n = graph_->size();
  nodes_.resize(static_cast<std::size_t>(n));
  const NodeId home = options_.placement == Placement::single_node
                          ? static_cast<NodeId>(rng_.index(static_cast<std::uint64_t>(n)))
                          : 0;
  for (int k = 0; k < options_.z0; ++k) {
    WalkToken w;
    w.key = next_key_++;
    w.id.root = static_cast<std::uint32_t>(k);
    w.position = options_.placement == Placement::single_node
                     ? home
                     : static_cast<NodeId>(rng_.index(static_cast<std::uint64_t>(n)));
    w.born_at = 0;
    origin_.push_back(w.position);
    walks_.push_back(std::move(w));
  }
  active_ = options_.z0;
  coverage_.assign(static_cast<std::size_t>(options_.z0),
                   std::vector<char>(static_cast<std::size_t>(n), 0));
  covered_.assign(static_cast<std::size_t>(options_.z0), 0);
  if (failures_.byzantine) byz_state_ = failures_.byzantine->initial_state;
  trace_.resolved_policy = policy_;
}

ReturnTimeHistogram Simulation::pooled_return_samples() const {
  ReturnTimeHistogram pooled;
  for (const auto& node : nodes_) pooled.merge(node.return_samples());
  return pooled;
}

void Simulation::move_walks() {
  for (auto& w : walks_)
    if (w.active) w.position = uniform_neighbor(*graph_, w.position, rng_);
}

void Simulation::visit(NodeId node, std::size_t walk) {
  NodeState& state = nodes_[static_cast<std::size_t>(node)];
  const WalkToken& w = walks_[walk];
  if (!state.knows(w.key) && node != origin_[walk])
    hitting_samples_.push_back(time_ - w.born_at);
  record_visit(state, w.key, time_);

  if (!warmup_done_ && walk < coverage_.size()) {
    char& seen = coverage_[walk][static_cast<std::size_t>(node)];
    if (!seen) {
      seen = 1;
      ++covered_[walk];
    }
  }
}

TimeStep Simulation::warmup() {
  if (warmup_done_) throw std::logic_error("warmup: already done");
  const int n = graph_->size();
  auto complete = [&] {
    return std::all_of(covered_.begin(), covered_.end(), [n](int c) { return c == n; });
  };
  while (!complete()) {
    if (time_ >= options_.warmup_cap)
      throw WarmupTimeout("warmup: coverage incomplete after " + std::to_string(time_) + " steps");
    ++time_;
    move_walks();
    for (std::size_t i = 0; i < walks_.size(); ++i) visit(walks_[i].position, i);
  }

  // Relabel the time axis so that the first post-warmup step is t = 1.
  const TimeStep offset = time_;
  for (auto& node : nodes_) node.shift_time(offset);
  for (auto& w : walks_) w.born_at -= offset;
  time_ = 0;
  warmup_done_ = true;

  resolve_policy();
  trace_.warmup_steps = offset;
  trace_.resolved_policy = policy_;
  trace_.z_series.assign(1, active_);
  refresh_fitted_rates();
  return offset;
}

void Simulation::resolve_policy() {
  const ReturnTimeHistogram pooled = pooled_return_samples();
  const double mean_gap = pooled.mean();
  if (policy_.fork_prob <= 0.0) policy_.fork_prob = 1.0 / policy_.z0;
  if (policy_.survival_mode == SurvivalMode::analytical_exponential && policy_.lambda <= 0.0) {
    // Fit the tail beyond the median gap: the short back-and-forth returns
    // below it barely affect how long other walks stay unseen. Walks that
    // have not returned yet count as censored gaps.
    if (pooled.empty()) throw RuntimeError("cannot fit lambda: no return samples after warmup");
    std::vector<std::int64_t> open;
    for (const NodeState& node : nodes_)
      for (WalkKey key : node.known()) open.push_back(time_ - node.last_seen(key));
    policy_.lambda = fit_tail_rate(pooled, open, pooled.quantile(0.5));
    if (!(policy_.lambda > 0.0)) throw RuntimeError("cannot fit lambda: no long return gaps");
  }
  if (policy_.offset_mode == OffsetMode::geometric_corrected && policy_.q <= 0.0 && mean_gap > 0.0)
    policy_.q = 1.0 / mean_gap;
  if (policy_.kind == PolicyKind::missing_person && policy_.t_mp <= 0)
    policy_.t_mp = default_missing_person_threshold(pooled, policy_.z0);
}

void Simulation::refresh_fitted_rates() {
  const ReturnTimeHistogram pooled = pooled_return_samples();
  trace_.lambda_hat = pooled.empty() ? 0.0 : 1.0 / pooled.mean();
  if (hitting_samples_.empty()) {
    trace_.mu_hat = 0.0;
  } else {
    const double sum = std::accumulate(hitting_samples_.begin(), hitting_samples_.end(), 0.0);
    trace_.mu_hat = static_cast<double>(hitting_samples_.size()) / sum;
  }
}

void Simulation::log_death(std::size_t walk, EventKind kind, StepEvents& out) {
  --active_;
  ++out.deaths;
  out.events.push_back({time_, kind, walks_[walk].id.str(), walks_[walk].position});
}

void Simulation::apply_failures(StepEvents& out) {
  if (next_burst_ < failures_.bursts.size() && failures_.bursts[next_burst_].t == time_) {
    for (std::size_t i : apply_burst(walks_, failures_.bursts[next_burst_].count, time_, rng_))
      log_death(i, EventKind::burst_fail, out);
    ++next_burst_;
  }
  if (failures_.p_fail > 0.0) {
    for (std::size_t i : apply_probabilistic(walks_, failures_.p_fail, time_, rng_))
      log_death(i, EventKind::prob_fail, out);
  }
  if (failures_.byzantine) {
    const auto& byz = *failures_.byzantine;
    const auto& sched = byz.schedule_override;
    if (next_override_ < sched.size() && sched[next_override_].first == time_) {
      byz_state_ = sched[next_override_].second;
      ++next_override_;
    } else {
      byz_state_ = byzantine_step(byz_state_, byz.p_transit, rng_);
    }
    if (byz_state_ == ByzState::byz)
      for (std::size_t i : absorb_at_byzantine(walks_, byz.node, time_))
        log_death(i, EventKind::byz_kill, out);
  }
}

std::size_t Simulation::fork_walk(NodeId node, std::size_t parent, TimeStep t) {
  if (parent >= walks_.size() || !walks_[parent].active)
    throw std::logic_error("fork_walk: parent must be an active walk");
  WalkToken child;
  child.key = next_key_++;
  child.id = walks_[parent].id.child(node, t);
  child.position = node;
  child.born_at = t;
  walks_.push_back(std::move(child));
  origin_.push_back(node);
  ++active_;
  return walks_.size() - 1;
}

std::size_t Simulation::fork_replacement(NodeId node, WalkKey replaced, TimeStep t) {
  WalkToken child;
  child.key = replaced;
  child.id.root = replaced;
  child.position = node;
  child.born_at = t;
  walks_.push_back(std::move(child));
  origin_.push_back(node);
  ++active_;
  return walks_.size() - 1;
}

void Simulation::decide_at(NodeId node, std::size_t visitor, StepEvents& out) {
  NodeState& state = nodes_[static_cast<std::size_t>(node)];
  const WalkKey key = walks_[visitor].key;

  if (policy_.kind == PolicyKind::missing_person) {
    const Decision d = missing_person_decide(state, key, time_, policy_, rng_);
    for (WalkKey replaced : d.replace_ids) {
      const std::size_t child = fork_replacement(node, replaced, time_);
      state.set_last_seen(replaced, time_);
      ++out.forks;
      out.events.push_back({time_, EventKind::fork, walks_[child].id.str(), node});
    }
    return;
  }

  const bool want_terms = options_.log_survival_terms || options_.prune_below > 0.0;
  terms_.clear();
  const double z_hat = estimate(state, key, time_, policy_, want_terms ? &terms_ : nullptr);
  if (options_.log_estimates) trace_.estimates.push_back({time_, node, z_hat});
  if (options_.log_survival_terms)
    trace_.survival_terms.insert(trace_.survival_terms.end(), terms_.begin(), terms_.end());
  if (options_.prune_below > 0.0) {
    std::vector<WalkKey> stale;
    std::size_t k = 0;
    for (WalkKey other : state.known()) {
      if (other == key) continue;
      if (terms_[k++] < options_.prune_below) stale.push_back(other);
    }
    for (WalkKey other : stale) state.forget(other);
  }

  Decision d;
  switch (policy_.kind) {
    case PolicyKind::decafork: d = decafork_decide(z_hat, policy_, rng_); break;
    case PolicyKind::decafork_plus: d = decaforkplus_decide(z_hat, policy_, rng_); break;
    default: return;
  }
  if (d.action == DecisionAction::fork) {
    const std::size_t child = fork_walk(node, visitor, time_);
    if (options_.local_knowledge) state.set_last_seen(walks_[child].key, time_);
    ++out.forks;
    out.events.push_back({time_, EventKind::fork, walks_[child].id.str(), node});
  } else if (d.action == DecisionAction::terminate) {
    walks_[visitor].active = false;
    walks_[visitor].died_at = time_;
    if (options_.local_knowledge) state.forget(key);
    log_death(visitor, EventKind::terminate, out);
  }
}

void Simulation::process_arrivals(StepEvents& out) {
  arrivals_.clear();
  for (std::size_t i = 0; i < walks_.size(); ++i)
    if (walks_[i].active) arrivals_.emplace_back(walks_[i].position, i);
  std::sort(arrivals_.begin(), arrivals_.end());

  for (std::size_t lo = 0; lo < arrivals_.size();) {
    std::size_t hi = lo;
    const NodeId node = arrivals_[lo].first;
    while (hi < arrivals_.size() && arrivals_[hi].first == node) ++hi;
    for (std::size_t k = lo; k < hi; ++k) visit(node, arrivals_[k].second);
    const std::size_t chosen = arrivals_[lo + rng_.index(hi - lo)].second;
    decide_at(node, chosen, out);
    lo = hi;
  }
}

StepEvents Simulation::step() {
  if (!warmup_done_) throw std::logic_error("step: warmup has not run");
  StepEvents out;
  ++time_;
  move_walks();
  apply_failures(out);
  process_arrivals(out);
  trace_.z_series.push_back(active_);
  trace_.events.insert(trace_.events.end(), out.events.begin(), out.events.end());
  return out;
}

const RunTrace& Simulation::run(TimeStep horizon) {
  if (!warmup_done_) throw std::logic_error("run: warmup has not run");
  for (TimeStep s = 0; s < horizon; ++s) step();
  refresh_fitted_rates();
  return trace_;
}

}  // namespace rwres
