#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rwres::theory {

void TheoryParams::validate() const {
  if (!(lambda_r > 0.0) || !std::isfinite(lambda_r)) throw DomainError("lambda_r must be positive");
  if (!(mu_h > 0.0) || !std::isfinite(mu_h)) throw DomainError("mu_h must be positive");
  if (z0 < 1) throw DomainError("z0 must be at least 1");
  if (!(fork_prob >= 0.0 && fork_prob <= 1.0)) throw DomainError("fork_prob must be in [0, 1]");
  if (n < 1) throw DomainError("n must be at least 1");
}

void EventHistory::validate() const {
  if (active_count < 1) {
    throw DomainError("event history: empty active set (a visiting walk must exist)");
  }
  auto check = [&](const std::vector<std::pair<double, int>>& events, const char* what) {
    for (const auto& [when, count] : events) {
      if (count < 1) throw DomainError(std::string("event history: ") + what + " count < 1");
      if (!(when <= now)) throw DomainError(std::string("event history: ") + what + " after now");
    }
  };
  check(terminations, "termination");
  check(forks, "fork");
}

double expected_estimate(const EventHistory& h, const TheoryParams& params) {
  h.validate();
  params.validate();
  double e = 0.5 + 0.5 * (h.active_count - 1);
  for (const auto& [tau, count] : h.terminations) {
    e += count * 0.5 * std::exp(-params.lambda_r * (h.now - tau));
  }
  for (const auto& [tau, count] : h.forks) {
    e += count * forked_mean(h.now, tau, h.now, params.lambda_r, params.mu_h);
  }
  return e;
}

double estimate_variance(const EventHistory& h, const TheoryParams& params) {
  h.validate();
  params.validate();
  double v = (h.active_count - 1) / 12.0;
  for (const auto& [tau, count] : h.forks) {
    v += count * forked_var(h.now, tau, h.now, params.lambda_r, params.mu_h);
  }
  for (const auto& [tau, count] : h.terminations) {
    v += count * std::exp(-2.0 * params.lambda_r * (h.now - tau)) / 12.0;
  }
  return v;
}

double bennett_h(double z) {
  if (z < -1.0) throw DomainError("bennett_h: argument below -1");
  return (1.0 + z) * std::log1p(z) - z;
}

namespace {

BoundResult bennett_bound(double p, double gap, double var) {
  if (!(gap > 0.0)) return {p, false};
  if (!(var > 0.0)) return {0.0, true};
  const double zeta = gap * gap / var;
  return {std::clamp(p * std::exp(-var * bennett_h(zeta)), 0.0, 1.0), true};
}

}  // namespace

BoundResult fork_prob_bound(const EventHistory& h, const TheoryParams& params) {
  const double e = expected_estimate(h, params);
  const double v = estimate_variance(h, params);
  return bennett_bound(params.fork_prob, e - params.gamma, v);
}

BoundResult term_prob_bound(const EventHistory& h, const TheoryParams& params) {
  const double e = expected_estimate(h, params);
  const double v = estimate_variance(h, params);
  return bennett_bound(params.fork_prob, params.gamma_term - e, v);
}

double pfork_plus(int i, const TheoryParams& params) {
  if (i < 1) throw DomainError("pfork_plus: walk count must be at least 1");
  const double f = irwin_hall_cdf(i - 1, params.gamma - 0.5);
  return std::min(1.0, i * params.fork_prob * f);
}

}  // namespace rwres::theory
