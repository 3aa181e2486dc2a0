#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rwres/rng.hpp"
#include "rwres/walk.hpp"

namespace rwres {

enum class PolicyKind { none, missing_person, decafork, decafork_plus };
enum class SurvivalMode { empirical_pooled, analytical_exponential };
enum class OffsetMode { half, geometric_corrected };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(SurvivalMode mode);
std::string_view to_string(OffsetMode mode);
PolicyKind parse_policy_kind(std::string_view name);
SurvivalMode parse_survival_mode(std::string_view name);
OffsetMode parse_offset_mode(std::string_view name);

/// Parameters shared by all control policies. Zero-valued optional knobs
/// (fork_prob, t_mp, lambda, q) are resolved by the engine after warmup.
struct PolicyConfig {
  PolicyKind kind = PolicyKind::decafork;
  int z0 = 10;
  double gamma = 2.0;
  double gamma_term = 5.75;
  TimeStep t_mp = 0;        // 0: empirical quantile of pooled return gaps
  double fork_prob = 0.0;   // 0: 1 / z0
  SurvivalMode survival_mode = SurvivalMode::empirical_pooled;
  double lambda = 0.0;      // analytical mode rate; 0: tail fit beyond the median gap
  OffsetMode offset_mode = OffsetMode::half;
  double q = 0.0;           // geometric correction; 0: fitted as 1 / mean gap

  double effective_fork_prob() const { return fork_prob > 0.0 ? fork_prob : 1.0 / z0; }

  /// Constant added for the visiting walk: 1/2, or (1-q)/(2-q).
  double offset() const;

  void validate() const;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

enum class DecisionAction { none, fork, terminate };

struct Decision {
  DecisionAction action = DecisionAction::none;
  std::optional<double> estimate;
  std::vector<WalkKey> replace_ids;  // MissingPerson only
};

/// Estimated probability that a walk last seen `elapsed` steps ago has not
/// yet returned. Empirical mode with an empty pool returns 1.
double survival(const NodeState& node, std::int64_t elapsed, const PolicyConfig& cfg);

/// Offset plus the survival of every other known walk. When `terms` is
/// non-null the individual survival values are appended to it.
double estimate(const NodeState& node, WalkKey visiting, TimeStep t, const PolicyConfig& cfg,
                std::vector<double>* terms = nullptr);

/// Fork with probability p when z_hat < gamma. `draw` is the uniform
/// variate used for the Bernoulli trial.
Decision decafork_decide(double z_hat, const PolicyConfig& cfg, double draw);
Decision decafork_decide(double z_hat, const PolicyConfig& cfg, Rng& rng);

/// DecAFork plus termination with probability p when z_hat > gamma_term.
Decision decaforkplus_decide(double z_hat, const PolicyConfig& cfg, double draw);
Decision decaforkplus_decide(double z_hat, const PolicyConfig& cfg, Rng& rng);

/// Every root id other than the visitor that has been unseen for more than
/// t_mp steps is independently scheduled for replacement with probability p.
Decision missing_person_decide(const NodeState& node, WalkKey visiting, TimeStep t,
                               const PolicyConfig& cfg, Rng& rng);

/// Exponential rate of the return-time tail beyond `cutoff`, by censored
/// maximum likelihood: completed gaps from `pooled` are events, and
/// `open_ages` (time since last visit for walks that have not yet returned)
/// are censored exposures. Returns 0 when no gap exceeds the cutoff.
double fit_tail_rate(const ReturnTimeHistogram& pooled, std::span<const std::int64_t> open_ages,
                     std::int64_t cutoff);

/// Default MissingPerson staleness threshold: the (1 - 0.01/z0) quantile
/// of the pooled return gaps.
TimeStep default_missing_person_threshold(const ReturnTimeHistogram& pooled, int z0);

}  // namespace rwres
