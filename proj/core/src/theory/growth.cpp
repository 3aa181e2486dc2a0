#include "rwres/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwres::theory {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Schedule {
  std::vector<double> t;       // t_i, i = z0 .. z_bound-1
  std::vector<double> prefix;  // prefix[k] = sum of the first k phase lengths
  std::vector<double> pplus;   // p+_i, i = z0 .. z_bound
};

Schedule make_schedule(int z_bound, const TheoryParams& params) {
  params.validate();
  if (z_bound <= params.z0) throw DomainError("growth bound: z_bound must exceed z0");
  Schedule s;
  for (int i = params.z0; i <= z_bound; ++i) s.pplus.push_back(pfork_plus(i, params));
  s.prefix.push_back(0.0);
  for (int i = params.z0; i < z_bound; ++i) {
    s.t.push_back(growth_phase_length(i, params));
    s.prefix.push_back(s.prefix.back() + s.t.back());
  }
  return s;
}

// delta accumulated by completed phases z0 .. k-1.
double completed_phases(const Schedule& s, int count, const TheoryParams& params) {
  double acc = 0.0;
  for (int j = 0; j < count; ++j) {
    acc += params.n * std::exp(-params.mu_h * s.t[j]) + s.t[j] * s.pplus[j];
  }
  return acc;
}

double short_horizon(double p, double t_total) {
  if (p >= 1.0) return 1.0;
  return -std::expm1(t_total * std::log1p(-p));
}

}  // namespace

double growth_phase_length(int i, const TheoryParams& params) {
  const double p = pfork_plus(i, params);
  if (p <= 0.0) return kInf;
  return std::max(0.0, std::log(params.mu_h * params.n / p) / params.mu_h);
}

GrowthBound growth_prob_bound(int z_bound, double t_total, const TheoryParams& params) {
  if (!(t_total > 0.0)) throw DomainError("growth_prob_bound: t_total must be positive");
  const Schedule s = make_schedule(z_bound, params);
  // Phases completed before t_total: largest k with prefix[k] < t_total.
  int done = 0;
  while (done < static_cast<int>(s.t.size()) && s.prefix[done + 1] < t_total) ++done;

  GrowthBound out;
  out.n_max = params.z0 + done;
  out.t_schedule = s.t;
  out.t_nofork = t_total - s.prefix[done];
  if (done == 0) {
    out.delta = short_horizon(s.pplus[0], t_total);
  } else {
    out.delta = s.pplus[done] * out.t_nofork + completed_phases(s, done, params);
  }
  out.delta = std::clamp(out.delta, 0.0, 1.0);
  return out;
}

double growth_time_bound(double delta, int z_bound, const TheoryParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("growth_time_bound: delta must be in (0, 1)");
  const Schedule s = make_schedule(z_bound, params);
  const int phases = static_cast<int>(s.t.size());

  // Phase 0: 1 - (1 - p+)^T <= delta.
  const double p0 = s.pplus[0];
  if (p0 <= 0.0) return kInf;
  const double t0 = p0 >= 1.0 ? 0.0 : std::log1p(-delta) / std::log1p(-p0);
  if (t0 <= s.t[0] || !std::isfinite(s.t[0])) return std::min(t0, s.t[0]);

  // Later phases: delta(T) = completed + p+_k (T - prefix[k]) for
  // prefix[k] < T <= prefix[k + 1].
  for (int k = 1; k <= phases; ++k) {
    const double base = completed_phases(s, k, params);
    if (base > delta) return s.prefix[k];
    const double pk = s.pplus[k];
    if (pk <= 0.0) return kInf;
    const double tk = s.prefix[k] + (delta - base) / pk;
    if (k == phases || tk <= s.prefix[k + 1]) return tk;
  }
  return s.prefix.back();
}

}  // namespace rwres::theory
