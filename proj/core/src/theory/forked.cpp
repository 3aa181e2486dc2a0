#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>

namespace rwres::theory {
namespace {

struct Window {
  double age_term;  // t - tau_T
  double span;      // tau_T - tau_F
  double age_fork;  // t - tau_F
};

Window window(double t, double tau_f, double tau_t, double lambda_r, double mu_h) {
  if (!(lambda_r > 0.0) || !(mu_h > 0.0)) {
    throw DomainError("forked walk: rates must be positive");
  }
  if (std::isnan(t) || std::isnan(tau_f) || std::isnan(tau_t)) {
    throw DomainError("forked walk: NaN time");
  }
  tau_t = std::min(tau_t, t);
  if (tau_f > tau_t) {
    throw DomainError("forked walk: fork time after termination time");
  }
  return {t - tau_t, tau_t - tau_f, t - tau_f};
}

// (1 - e^{-u}) / u, continuous at 0.
double phi(double u) { return u == 0.0 ? 1.0 : -std::expm1(-u) / u; }

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Variance expression normalized by e^{-4 lambda t}, e^{mu tau_F} factors so that
// no exponent exceeds zero. `sign` is the sign of the e^{-mu span} term in
// the second bracket.
double variance_expr(double t, double tau_f, double tau_t, double lambda_r, double mu_h,
                     double sign) {
  const Window w = window(t, tau_f, tau_t, lambda_r, mu_h);
  if (near(mu_h, 2.0 * lambda_r) || near(mu_h, 3.0 * lambda_r)) {
    throw DomainError("forked_var: singular at mu = 2 lambda or mu = 3 lambda");
  }
  const double l = lambda_r;
  const double m = mu_h;
  const double c = std::exp(-l * w.age_term);
  const double em = std::exp(-m * w.span);
  const double e2 = std::exp(-2.0 * l * w.span);
  const double e3 = std::exp(-3.0 * l * w.span);
  const double first = 2.0 * (l - m) * em + m + m * e2 - 2.0 * l;
  const double second = 2.0 * m * e3 + (m - 3.0 * l) + sign * 3.0 * (l - m) * em;
  const double num = 3.0 * (3.0 * l - m) * first * first + 4.0 * (m - 2.0 * l) * (m - 2.0 * l) * second;
  const double den = 12.0 * (m - 3.0 * l) * (m - 2.0 * l) * (m - 2.0 * l);
  return c * c * num / den;
}

}  // namespace

double forked_cdf(double x, double t, double tau_f, double tau_t, double lambda_r, double mu_h) {
  const Window w = window(t, tau_f, tau_t, lambda_r, mu_h);
  if (std::isnan(x)) throw DomainError("forked_cdf: x is NaN");
  if (x < 0.0) return 0.0;
  const double c = std::exp(-lambda_r * w.age_term);
  const double atom = std::exp(-mu_h * w.span);
  if (x >= c) return 1.0;
  const double lo = std::exp(-lambda_r * w.age_fork);
  if (x < lo) return atom;
  // e^{-mu (t - tau_F)} x^{-mu/lambda}, combined in the exponent.
  const double scaled = std::exp(-mu_h * w.age_fork - (mu_h / lambda_r) * std::log(x));
  return std::clamp((x / c) * (1.0 - scaled) + atom, 0.0, 1.0);
}

double forked_mean(double t, double tau_f, double tau_t, double lambda_r, double mu_h) {
  const Window w = window(t, tau_f, tau_t, lambda_r, mu_h);
  const double c = std::exp(-lambda_r * w.age_term);
  const double d = w.span;
  const double em = std::exp(-mu_h * d);
  const double e2 = std::exp(-2.0 * lambda_r * d);
  // lambda (e^{-mu d} - e^{-2 lambda d}) / (2 lambda - mu), written so the
  // mu = 2 lambda limit needs no special case.
  const double u = (2.0 * lambda_r - mu_h) * d;
  const double ratio = lambda_r * d * (u >= 0.0 ? em * phi(u) : e2 * phi(-u));
  return std::max(0.0, c * (ratio - em + 0.5 + 0.5 * e2));
}

double forked_var(double t, double tau_f, double tau_t, double lambda_r, double mu_h) {
  return std::max(0.0, variance_expr(t, tau_f, tau_t, lambda_r, mu_h, +1.0));
}

double forked_var_as_published(double t, double tau_f, double tau_t, double lambda_r,
                               double mu_h) {
  return variance_expr(t, tau_f, tau_t, lambda_r, mu_h, -1.0);
}

}  // namespace rwres::theory
