#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwres/errors.hpp"

namespace rwres::theory {

std::vector<double> default_eps_grid(double gamma, int points) {
  if (!(gamma > 0.5)) throw DomainError("eps grid: gamma must exceed 1/2");
  if (points < 1) throw DomainError("eps grid: need at least one point");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double width = gamma - 0.5;
  for (int i = 1; i <= points; ++i) grid.push_back(width * i / (points + 1));
  return grid;
}

namespace {

// Steps until the product falls to delta for one eps, or -1 when the cap is
// hit first.
std::int64_t steps_for_eps(int k_t, int r, int z_active, const TheoryParams& params, double delta,
                           double eps, std::int64_t cap) {
  const double p = params.fork_prob;
  const double f_active = irwin_hall_cdf(z_active + r - 1, eps);
  const double room = params.gamma - eps - 0.5;
  const int m_failed = k_t - r;
  double log_prod = 0.0;
  const double log_delta = std::log(delta);
  for (std::int64_t s = 0; s <= cap; ++s) {
    const double scale = room * std::exp(params.lambda_r * static_cast<double>(s));
    const bool saturated = scale >= m_failed;
    const double f_failed = saturated ? 1.0 : irwin_hall_cdf(m_failed, scale);
    const double factor = 1.0 - p * f_active * f_failed;
    if (factor <= 0.0) return s;
    log_prod += std::log(factor);
    if (log_prod <= log_delta) return s;
    if (saturated) {
      // Every later factor equals this one.
      const double log_factor = std::log(factor);
      if (log_factor == 0.0) return -1;
      const double more = std::ceil((log_delta - log_prod) / log_factor);
      const double total = static_cast<double>(s) + more;
      return total > static_cast<double>(cap) ? -1 : static_cast<std::int64_t>(total);
    }
  }
  return -1;
}

}  // namespace

ReactionTime reaction_time_bound(int k_t, int r, int z_active, const TheoryParams& params,
                                 double delta_target, const ReactionTimeOptions& options) {
  params.validate();
  if (!(delta_target > 0.0 && delta_target < 1.0)) {
    throw DomainError("reaction_time_bound: delta must be in (0, 1)");
  }
  if (k_t < 1 || r < 0 || r >= k_t) throw DomainError("reaction_time_bound: need 0 <= r < k_t");
  if (z_active < 1) throw DomainError("reaction_time_bound: need at least one active walk");
  const std::vector<double> grid =
      options.eps_grid.empty() ? default_eps_grid(params.gamma) : options.eps_grid;
  for (double eps : grid) {
    if (!(eps > 0.0 && eps < params.gamma - 0.5)) {
      throw DomainError("reaction_time_bound: eps outside (0, gamma - 1/2)");
    }
  }
  ReactionTime best{std::numeric_limits<std::int64_t>::max(), 0.0};
  bool found = false;
  for (double eps : grid) {
    const std::int64_t s =
        steps_for_eps(k_t, r, z_active, params, delta_target, eps, options.step_cap);
    if (s >= 0 && s < best.steps) {
      best = {s, eps};
      found = true;
    }
  }
  if (!found) {
    throw CapExceeded("reaction_time_bound: product did not reach delta within the step cap");
  }
  return best;
}

std::int64_t chained_reaction_time(int k_t, int r_prime, int z_active, const TheoryParams& params,
                                   double delta_total, const ReactionTimeOptions& options) {
  if (r_prime < 1 || r_prime > k_t) throw DomainError("chained_reaction_time: need 1 <= r' <= k_t");
  if (!(delta_total > 0.0 && delta_total < 1.0)) {
    throw DomainError("chained_reaction_time: delta must be in (0, 1)");
  }
  const double share = delta_total / r_prime;
  std::int64_t total = 0;
  for (int r = 0; r < r_prime; ++r) {
    total += reaction_time_bound(k_t, r, z_active, params, share, options).steps;
  }
  return total;
}

}  // namespace rwres::theory
