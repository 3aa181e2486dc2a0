#include "rwres/policies.hpp"

#include <cmath>
#include <string>

#include "rwres/errors.hpp"

namespace rwres {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::none: return "none";
    case PolicyKind::missing_person: return "missing_person";
    case PolicyKind::decafork: return "decafork";
    case PolicyKind::decafork_plus: return "decafork_plus";
  }
  return "unknown";
}

std::string_view to_string(SurvivalMode mode) {
  return mode == SurvivalMode::empirical_pooled ? "empirical_pooled" : "analytical_exponential";
}

std::string_view to_string(OffsetMode mode) {
  return mode == OffsetMode::half ? "half" : "geometric_corrected";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "none") return PolicyKind::none;
  if (name == "missing_person") return PolicyKind::missing_person;
  if (name == "decafork") return PolicyKind::decafork;
  if (name == "decafork_plus") return PolicyKind::decafork_plus;
  throw ConfigError("unknown policy kind '" + std::string(name) + "'");
}

SurvivalMode parse_survival_mode(std::string_view name) {
  if (name == "empirical_pooled") return SurvivalMode::empirical_pooled;
  if (name == "analytical_exponential") return SurvivalMode::analytical_exponential;
  throw ConfigError("unknown survival mode '" + std::string(name) + "'");
}

OffsetMode parse_offset_mode(std::string_view name) {
  if (name == "half") return OffsetMode::half;
  if (name == "geometric_corrected") return OffsetMode::geometric_corrected;
  throw ConfigError("unknown offset mode '" + std::string(name) + "'");
}

double PolicyConfig::offset() const {
  if (offset_mode == OffsetMode::half) return 0.5;
  return (1.0 - q) / (2.0 - q);
}

void PolicyConfig::validate() const {
  if (z0 < 1) throw ConfigError("policy: z0 must be >= 1");
  if (fork_prob < 0.0 || fork_prob > 1.0) throw ConfigError("policy: fork_prob must lie in (0, 1]");
  if (kind == PolicyKind::decafork || kind == PolicyKind::decafork_plus) {
    if (!(gamma > 0.5)) throw ConfigError("policy: gamma must exceed 1/2");
  }
  if (kind == PolicyKind::decafork_plus && !(gamma_term > gamma))
    throw ConfigError("policy: gamma_term must exceed gamma");
  if (kind == PolicyKind::missing_person && t_mp != 0 && t_mp < 2)
    throw ConfigError("policy: t_mp must be >= 2");
  if (lambda < 0.0) throw ConfigError("policy: lambda must be positive");
  if (q < 0.0 || q >= 1.0) throw ConfigError("policy: q must lie in [0, 1)");
}

double survival(const NodeState& node, std::int64_t elapsed, const PolicyConfig& cfg) {
  if (cfg.survival_mode == SurvivalMode::analytical_exponential)
    return std::exp(-cfg.lambda * static_cast<double>(elapsed));
  const auto& pool = node.return_samples();
  if (pool.empty()) return 1.0;
  return static_cast<double>(pool.count_greater(elapsed)) / static_cast<double>(pool.size());
}

double estimate(const NodeState& node, WalkKey visiting, TimeStep t, const PolicyConfig& cfg,
                std::vector<double>* terms) {
  double z_hat = cfg.offset();
  for (WalkKey other : node.known()) {
    if (other == visiting) continue;
    const double s = survival(node, t - node.last_seen(other), cfg);
    if (terms) terms->push_back(s);
    z_hat += s;
  }
  return z_hat;
}

Decision decafork_decide(double z_hat, const PolicyConfig& cfg, double draw) {
  Decision d;
  d.estimate = z_hat;
  if (z_hat < cfg.gamma && draw < cfg.effective_fork_prob()) d.action = DecisionAction::fork;
  return d;
}

Decision decafork_decide(double z_hat, const PolicyConfig& cfg, Rng& rng) {
  if (z_hat < cfg.gamma) return decafork_decide(z_hat, cfg, rng.uniform());
  return Decision{DecisionAction::none, z_hat, {}};
}

Decision decaforkplus_decide(double z_hat, const PolicyConfig& cfg, double draw) {
  if (!(cfg.gamma_term > cfg.gamma)) throw ConfigError("policy: gamma_term must exceed gamma");
  Decision d = decafork_decide(z_hat, cfg, draw);
  if (z_hat > cfg.gamma_term && draw < cfg.effective_fork_prob())
    d.action = DecisionAction::terminate;
  return d;
}

Decision decaforkplus_decide(double z_hat, const PolicyConfig& cfg, Rng& rng) {
  if (z_hat < cfg.gamma || z_hat > cfg.gamma_term)
    return decaforkplus_decide(z_hat, cfg, rng.uniform());
  return decaforkplus_decide(z_hat, cfg, 1.0);
}

Decision missing_person_decide(const NodeState& node, WalkKey visiting, TimeStep t,
                               const PolicyConfig& cfg, Rng& rng) {
  Decision d;
  const double p = cfg.effective_fork_prob();
  for (int id = 0; id < cfg.z0; ++id) {
    const auto key = static_cast<WalkKey>(id);
    if (key == visiting) continue;
    const TimeStep seen = node.knows(key) ? node.last_seen(key) : 0;
    if (t - seen > cfg.t_mp && rng.bernoulli(p)) d.replace_ids.push_back(key);
  }
  if (!d.replace_ids.empty()) d.action = DecisionAction::fork;
  return d;
}

double fit_tail_rate(const ReturnTimeHistogram& pooled, std::span<const std::int64_t> open_ages,
                     std::int64_t cutoff) {
  const double events = static_cast<double>(pooled.count_greater(cutoff));
  double exposure = pooled.excess_over(cutoff);
  for (std::int64_t age : open_ages) {
    if (age > cutoff) exposure += static_cast<double>(age - cutoff);
  }
  if (events == 0.0 || exposure <= 0.0) return 0.0;
  return events / exposure;
}

TimeStep default_missing_person_threshold(const ReturnTimeHistogram& pooled, int z0) {
  if (pooled.empty()) throw RuntimeError("missing_person: no return samples to derive t_mp");
  const double level = 1.0 - 1e-2 / static_cast<double>(z0);
  return std::max<TimeStep>(2, pooled.quantile(level));
}

}  // namespace rwres
