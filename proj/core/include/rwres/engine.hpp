#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rwres/failures.hpp"
#include "rwres/graph.hpp"
#include "rwres/policies.hpp"
#include "rwres/rng.hpp"
#include "rwres/walk.hpp"

namespace rwres {

enum class Placement { single_node, random_nodes };
enum class EventKind { fork, terminate, prob_fail, burst_fail, byz_kill };

std::string_view to_string(Placement placement);
std::string_view to_string(EventKind kind);
Placement parse_placement(std::string_view name);

struct Event {
  TimeStep t = 0;
  EventKind kind = EventKind::fork;
  std::string walk;
  NodeId node = 0;

  bool is_death() const { return kind != EventKind::fork; }
  friend bool operator==(const Event&, const Event&) = default;
};

struct EstimateRecord {
  TimeStep t = 0;
  NodeId node = 0;
  double z_hat = 0.0;
  friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

/// Everything a run produced after warmup. z_series[t] is Z_t for
/// t = 0..horizon.
struct RunTrace {
  std::vector<int> z_series;
  std::vector<Event> events;
  std::vector<EstimateRecord> estimates;
  std::vector<double> survival_terms;

  TimeStep warmup_steps = 0;
  double lambda_hat = 0.0;  // 1 / mean pooled return gap, end of run
  double mu_hat = 0.0;      // 1 / mean first-hitting time, end of run
  PolicyConfig resolved_policy;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

struct SimOptions {
  int z0 = 10;
  Placement placement = Placement::single_node;
  std::uint64_t seed = 1;
  TimeStep warmup_cap = 1'000'000;
  bool log_estimates = false;
  bool log_survival_terms = false;
  /// Forget known walks whose survival drops below this value (0 = keep all).
  double prune_below = 0.0;
  /// A deciding node records the child it forks and forgets a walk it
  /// terminates.
  bool local_knowledge = true;
};

struct StepEvents {
  std::vector<Event> events;
  int forks = 0;
  int deaths = 0;
};

/// Synchronous discrete-time simulation of many walks on one graph.
///
/// Each step: advance t, move every active walk, apply failures (bursts,
/// probabilistic loss, Byzantine absorption), then at every node with
/// surviving arrivals record all visits and run the policy once on one
/// uniformly chosen arrival. Forked walks first move at the next step.
class Simulation {
 public:
  Simulation(std::shared_ptr<const Graph> graph, PolicyConfig policy, FailurePlan failures,
             SimOptions options);

  /// Moves walks (bookkeeping only) until every initial walk has visited
  /// every node, then relabels time so the current step is t = 0 and
  /// resolves auto-fitted policy parameters. Throws WarmupTimeout.
  TimeStep warmup();

  StepEvents step();

  /// Applies step() `horizon` times and returns the trace so far.
  const RunTrace& run(TimeStep horizon);

  /// Creates a copy of `parent` at `node`; returns the new token's index.
  /// Lineage gains (node, t); MissingPerson replacements instead take the
  /// replaced root identifier and key.
  std::size_t fork_walk(NodeId node, std::size_t parent, TimeStep t);
  std::size_t fork_replacement(NodeId node, WalkKey replaced, TimeStep t);

  TimeStep time() const { return time_; }
  bool warmed_up() const { return warmup_done_; }
  int active_count() const { return active_; }
  const Graph& graph() const { return *graph_; }
  const std::vector<WalkToken>& walks() const { return walks_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  const PolicyConfig& policy() const { return policy_; }
  const RunTrace& trace() const { return trace_; }
  ByzState byzantine_state() const { return byz_state_; }
  const std::vector<std::int64_t>& hitting_samples() const { return hitting_samples_; }

  /// All nodes' return gaps in one histogram.
  ReturnTimeHistogram pooled_return_samples() const;

 private:
  void move_walks();
  void apply_failures(StepEvents& out);
  void process_arrivals(StepEvents& out);
  void decide_at(NodeId node, std::size_t visitor, StepEvents& out);
  void visit(NodeId node, std::size_t walk);
  void log_death(std::size_t walk, EventKind kind, StepEvents& out);
  void resolve_policy();
  void refresh_fitted_rates();

  std::shared_ptr<const Graph> graph_;
  PolicyConfig policy_;
  FailurePlan failures_;
  SimOptions options_;
  Rng rng_;

  TimeStep time_ = 0;
  bool warmup_done_ = false;
  int active_ = 0;
  WalkKey next_key_ = 0;
  std::vector<WalkToken> walks_;
  std::vector<NodeId> origin_;  // node where each token was created
  std::vector<NodeState> nodes_;
  ByzState byz_state_ = ByzState::no_byz;
  std::size_t next_burst_ = 0;
  std::size_t next_override_ = 0;

  std::vector<std::vector<char>> coverage_;  // per initial walk
  std::vector<int> covered_;
  std::vector<std::int64_t> hitting_samples_;

  std::vector<std::pair<NodeId, std::size_t>> arrivals_;  // scratch
  std::vector<double> terms_;                             // scratch
  RunTrace trace_;
};

}  // namespace rwres
