#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rwres::theory {
namespace {

void check_terms(int m) {
  if (m < 0 || m > kIrwinHallMaxTerms) {
    throw DomainError("irwin_hall: term count " + std::to_string(m) + " outside [0, " +
                      std::to_string(kIrwinHallMaxTerms) + "]");
  }
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Lower tail by the alternating sum; reports the largest term magnitude so
// the caller can judge cancellation.
double alternating_lower(int m, double sigma, double& max_term) {
  CompensatedSum acc;
  max_term = 0.0;
  const int kmax = static_cast<int>(std::floor(sigma));
  for (int k = 0; k <= kmax && k <= m; ++k) {
    const double base = sigma - k;
    if (base <= 0.0) break;
    const double log_mag = m * std::log(base) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
    const double mag = std::exp(log_mag);
    max_term = std::max(max_term, mag);
    acc.add((k % 2 == 0) ? mag : -mag);
  }
  return acc.value();
}

}  // namespace

double irwin_hall_cdf_recurrence(int m, double sigma) {
  check_terms(m);
  if (std::isnan(sigma)) throw DomainError("irwin_hall: sigma is NaN");
  if (m == 0) return sigma < 0.0 ? 0.0 : 1.0;
  if (sigma <= 0.0) return 0.0;
  if (sigma >= m) return 1.0;
  // f[k] holds F_j(sigma - k) for the current j.
  std::vector<double> f(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) f[k] = std::clamp(sigma - k, 0.0, 1.0);
  for (int j = 2; j <= m; ++j) {
    for (int k = 0; k + 1 <= m; ++k) {
      const double y = sigma - k;
      double v;
      if (y <= 0.0) {
        v = 0.0;
      } else if (y >= j) {
        v = 1.0;
      } else {
        v = (y * f[k] + (j - y) * f[k + 1]) / j;
      }
      f[k] = v;
    }
    f[m] = 0.0;  // only needed while sigma - m < 0
  }
  return std::clamp(f[0], 0.0, 1.0);
}

double irwin_hall_cdf(int m, double sigma) {
  check_terms(m);
  if (std::isnan(sigma)) throw DomainError("irwin_hall: sigma is NaN");
  if (m == 0) return sigma < 0.0 ? 0.0 : 1.0;
  if (sigma <= 0.0) return 0.0;
  if (sigma >= m) return 1.0;

  // Evaluate the shorter tail; the law is symmetric about m/2.
  const bool upper = sigma > 0.5 * m;
  const double s = upper ? m - sigma : sigma;
  double max_term = 0.0;
  double tail = alternating_lower(m, s, max_term);
  const double terms = std::floor(s) + 1.0;
  const double err = max_term * terms * std::numeric_limits<double>::epsilon();
  if (!(tail > 0.0) || err > 1e-11 * tail) {
    tail = irwin_hall_cdf_recurrence(m, s);
  }
  tail = std::clamp(tail, 0.0, 1.0);
  return upper ? 1.0 - tail : tail;
}

double scaled_failed_cdf(int k, double sigma, double lambda_r, double elapsed) {
  if (!(lambda_r > 0.0)) throw DomainError("scaled_failed_cdf: lambda must be positive");
  if (elapsed < 0.0) throw DomainError("scaled_failed_cdf: elapsed must be non-negative");
  if (sigma <= 0.0) return irwin_hall_cdf(k, sigma);
  // Overflowing scale saturates the CDF.
  const double log_arg = std::log(sigma) + lambda_r * elapsed;
  if (log_arg > std::log(static_cast<double>(kIrwinHallMaxTerms) + 1.0)) {
    return irwin_hall_cdf(k, static_cast<double>(k) + 1.0);
  }
  return irwin_hall_cdf(k, std::exp(log_arg));
}

Thresholds design_thresholds(int z0, double delta_star) {
  if (z0 < 2 || z0 - 1 > kIrwinHallMaxTerms) {
    throw DomainError("design_thresholds: z0 must be in [2, 65]");
  }
  if (!(delta_star > 0.0 && delta_star < 0.5)) {
    throw DomainError("design_thresholds: delta must be in (0, 1/2)");
  }
  // The other z0 - 1 walks contribute IH(z0 - 1); F is continuous and
  // increasing on [0, z0 - 1], so bisect F(x) = target.
  const int m = z0 - 1;
  auto solve = [&](double target) {
    double lo = 0.0;
    double hi = static_cast<double>(m);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (irwin_hall_cdf(m, mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  Thresholds out;
  out.gamma = solve(delta_star) + 0.5;
  out.gamma_term = solve(1.0 - delta_star) + 0.5;
  return out;
}

}  // namespace rwres::theory
