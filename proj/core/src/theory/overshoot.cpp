#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rwres::theory {
namespace {

// Ceiling that ignores accumulated rounding just above an integer.
double ceil_count(double x) { return std::ceil(x - 1e-9); }

struct DefaultBound {
  const TheoryParams* params;
  bool* met;
  double operator()(const EventHistory& h) const {
    const BoundResult b = fork_prob_bound(h, *params);
    if (!b.precondition_met) *met = false;
    return b.value;
  }
};

// History after a failure: `z_start` survivors, the remaining z0 - z_start
// terminated at tau_t, and forks at the given (time, count) increments.
EventHistory failure_history(int z_start, double tau_t, const TheoryParams& params,
                             std::vector<std::pair<double, int>> forks, double now) {
  EventHistory h;
  h.active_count = z_start;
  if (params.z0 > z_start) h.terminations.push_back({tau_t, params.z0 - z_start});
  h.forks = std::move(forks);
  h.now = now;
  return h;
}

}  // namespace

OvershootSeries overshoot_approx(int z_start, double tau_t, double t_first_fork, int horizon,
                                 const TheoryParams& params, const ForkBoundFn& fork_bound) {
  params.validate();
  if (horizon < 1) throw DomainError("overshoot_approx: horizon must be at least 1");
  if (z_start < 1) throw DomainError("overshoot_approx: need at least one surviving walk");
  if (t_first_fork < tau_t) throw DomainError("overshoot_approx: first fork precedes the failure");

  OvershootSeries out;
  const ForkBoundFn bound = fork_bound ? fork_bound
                                       : ForkBoundFn(DefaultBound{&params, &out.precondition_always_met});
  out.expected.push_back(static_cast<double>(z_start));
  std::vector<std::pair<double, int>> forks;
  for (int k = 1; k <= horizon; ++k) {
    const double prev = ceil_count(out.expected.back());
    if (k >= 2) {
      const double grew = prev - ceil_count(out.expected[k - 2]);
      if (grew > 0) forks.push_back({t_first_fork + k - 1, static_cast<int>(grew)});
    }
    const EventHistory h = failure_history(z_start, tau_t, params, forks, t_first_fork + k - 1);
    const double pbar = bound(h);
    out.expected.push_back(prev + prev * pbar);
  }
  return out;
}

double binomial_growth_tail(int n, int threshold, double p) {
  if (n < 0) throw DomainError("binomial tail: negative trials");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial tail: p outside [0, 1]");
  // Need more than threshold - n successes.
  const int need = threshold - n + 1;
  if (need <= 0) return 1.0;
  if (need > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lfn = std::lgamma(n + 1.0);
  double acc = 0.0;
  for (int k = need; k <= n; ++k) {
    acc += std::exp(lfn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
  }
  return std::clamp(acc, 0.0, 1.0);
}

OvershootThresholds default_overshoot_thresholds(int z_after_failure, int depth) {
  if (z_after_failure < 1) throw DomainError("overshoot thresholds: need a positive count");
  if (depth < 1 || depth > kOvershootMaxDepth) throw DomainError("overshoot thresholds: bad depth");
  OvershootThresholds out;
  out[""] = z_after_failure;
  std::vector<std::string> level{""};
  for (int len = 1; len <= depth - 2; ++len) {
    std::vector<std::string> next;
    for (const std::string& prefix : level) {
      const int parent = out.at(prefix);
      out[prefix + "0"] = parent;
      out[prefix + "1"] = std::max(parent + 1, static_cast<int>(std::ceil(1.2 * parent)));
      next.push_back(prefix + "0");
      next.push_back(prefix + "1");
    }
    level = std::move(next);
  }
  return out;
}

void validate_overshoot_thresholds(const OvershootThresholds& thresholds, int depth) {
  if (depth < 1 || depth > kOvershootMaxDepth) {
    throw DomainError("overshoot_exact: depth must be in [1, " + std::to_string(kOvershootMaxDepth) + "]");
  }
  std::vector<std::string> level{""};
  for (int len = 0; len <= depth - 2; ++len) {
    std::vector<std::string> next;
    for (const std::string& prefix : level) {
      auto it = thresholds.find(prefix);
      if (it == thresholds.end()) {
        throw DomainError("overshoot_exact: missing threshold for prefix '" + prefix + "'");
      }
      if (len >= 1) {
        const int parent = thresholds.at(prefix.substr(0, prefix.size() - 1));
        const bool one = prefix.back() == '1';
        if (one && !(it->second > parent)) {
          throw DomainError("overshoot_exact: threshold '" + prefix + "' must exceed its parent");
        }
        if (!one && !(it->second <= 2 * parent)) {
          throw DomainError("overshoot_exact: threshold '" + prefix + "' exceeds twice its parent");
        }
      }
      next.push_back(prefix + "0");
      next.push_back(prefix + "1");
    }
    level = std::move(next);
  }
}

double overshoot_exact(int z_after_failure, double t_first_fork, int depth,
                       const OvershootThresholds& thresholds, const TheoryParams& params,
                       double tau_t, const ForkBoundFn& fork_bound) {
  params.validate();
  if (z_after_failure < 1) throw DomainError("overshoot_exact: need at least one surviving walk");
  if (t_first_fork < tau_t) throw DomainError("overshoot_exact: first fork precedes the failure");
  validate_overshoot_thresholds(thresholds, depth);

  bool met = true;
  const ForkBoundFn bound = fork_bound ? fork_bound : ForkBoundFn(DefaultBound{&params, &met});
  const int steps = depth - 1;
  double total = 0.0;
  for (std::uint32_t bits = 0; bits < (1u << steps); ++bits) {
    std::string prefix;
    std::vector<std::pair<double, int>> forks;
    int z = z_after_failure;
    double weight = 1.0;
    for (int j = 1; j <= steps && weight > 0.0; ++j) {
      const double now = t_first_fork + j - 1;
      const double pbar = bound(failure_history(z_after_failure, tau_t, params, forks, now));
      const int zeta = thresholds.at(prefix);
      const bool up = (bits >> (j - 1)) & 1u;
      int next;
      if (up) {
        weight *= binomial_growth_tail(z, zeta, pbar);
        next = 2 * z;
      } else {
        next = zeta;
      }
      if (next > z) forks.push_back({now + 1, next - z});
      z = next;
      prefix.push_back(up ? '1' : '0');
    }
    if (weight <= 0.0) continue;
    const double now = t_first_fork + steps;
    const double pbar = bound(failure_history(z_after_failure, tau_t, params, forks, now));
    total += weight * (z + z * pbar);
  }
  return total;
}

}  // namespace rwres::theory
