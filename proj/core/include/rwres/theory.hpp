#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rwres::theory {

/// Argument outside the domain where a closed form is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Rates and policy constants used by every closed-form evaluation.
/// Return times are modeled Exp(lambda_r), first hitting times Exp(mu_h).
struct TheoryParams {
  double lambda_r = 0.01;
  double mu_h = 0.01;
  int z0 = 10;
  double fork_prob = 0.1;
  double gamma = 2.0;
  double gamma_term = 5.75;
  int n = 100;

  void validate() const;
};

/// Fork/termination history seen by a visited node at time `now`:
/// `active_count` walks active since forever, groups of walks terminated at
/// given times, and groups forked at given times.
struct EventHistory {
  int active_count = 1;
  std::vector<std::pair<double, int>> terminations;  // (tau_T, count)
  std::vector<std::pair<double, int>> forks;         // (tau_F, count)
  double now = 0.0;

  void validate() const;
};

/// A bound together with whether its precondition held. When it did not,
/// `value` is the trivial bound (the raw per-visit probability).
struct BoundResult {
  double value = 0.0;
  bool precondition_met = true;
};

// ---------------------------------------------------------------------------
// Irwin-Hall law of a sum of m iid U(0,1) variables.

inline constexpr int kIrwinHallMaxTerms = 64;

/// CDF of the sum of m uniforms. Alternating-sum closed form with
/// log-domain terms and compensated summation; when the cancellation
/// estimate exceeds 1e-11 the stable three-term recurrence is used instead.
/// Throws DomainError for m < 0 or m > 64.
double irwin_hall_cdf(int m, double sigma);

/// Stable recurrence F_m(x) = (x F_{m-1}(x) + (m - x) F_{m-1}(x - 1)) / m.
double irwin_hall_cdf_recurrence(int m, double sigma);

/// CDF of the estimator part contributed by k walks that all failed
/// `elapsed` steps ago: IH(k, sigma * exp(lambda * elapsed)).
double scaled_failed_cdf(int k, double sigma, double lambda_r, double elapsed);

struct Thresholds {
  double gamma = 0.0;
  double gamma_term = 0.0;
};

/// Fork and termination thresholds such that, with z0 walks active, the
/// estimator falls below gamma (resp. above gamma_term) with probability
/// delta_star. Bisection to 1e-9 absolute.
Thresholds design_thresholds(int z0, double delta_star);

// ---------------------------------------------------------------------------
// Survival value of a walk forked at tau_f and terminated at tau_t, as seen
// by a random node at time t. For a walk still active pass tau_t = t; a
// tau_t later than t is treated as t.

double forked_cdf(double x, double t, double tau_f, double tau_t, double lambda_r, double mu_h);
double forked_mean(double t, double tau_f, double tau_t, double lambda_r, double mu_h);

/// Variance of the forked-walk survival value. Singular (DomainError) for
/// mu = 2 lambda and mu = 3 lambda.
double forked_var(double t, double tau_f, double tau_t, double lambda_r, double mu_h);

/// The variance expression exactly as printed in the source analysis,
/// including the sign of its e^{-mu (tau_t - tau_f)} term. Kept so that
/// reports can show the mismatch against the process oracle; do not use
/// it for bounds.
double forked_var_as_published(double t, double tau_f, double tau_t, double lambda_r,
                               double mu_h);

// ---------------------------------------------------------------------------
// Estimator moments and concentration bounds.

/// E[Z_hat] = 1/2 + (A-1)/2 + sum_T |T| e^{-lambda (t - tau_T)} / 2
///            + sum_F |F| forked_mean(t, tau_F, t).
/// This tracks half the number of walks.
double expected_estimate(const EventHistory& h, const TheoryParams& params);

/// sigma^2(t) = (A-1)/12 + sum_F |F| forked_var + sum_T |T| e^{-2 lambda (t - tau_T)} / 12.
double estimate_variance(const EventHistory& h, const TheoryParams& params);

/// Bennett's function h(z) = (1 + z) log(1 + z) - z.
double bennett_h(double z);

/// p exp(-sigma^2 h((E - gamma)^2 / sigma^2)); requires E > gamma.
BoundResult fork_prob_bound(const EventHistory& h, const TheoryParams& params);

/// p exp(-sigma^2 h((gamma_term - E)^2 / sigma^2)); requires E < gamma_term.
BoundResult term_prob_bound(const EventHistory& h, const TheoryParams& params);

/// Per-step fork probability bound with i walks: i p IH(i-1, gamma - 1/2),
/// clamped to 1.
double pfork_plus(int i, const TheoryParams& params);

// ---------------------------------------------------------------------------
// Reaction time after k_t walks failed.

struct ReactionTimeOptions {
  std::vector<double> eps_grid;        // empty: default_eps_grid(gamma)
  std::int64_t step_cap = 10'000'000;
};

struct ReactionTime {
  std::int64_t steps = 0;  // steps after the failure
  double eps = 0.0;        // grid point achieving the minimum
};

/// 64 evenly spaced interior points of (0, gamma - 1/2).
std::vector<double> default_eps_grid(double gamma, int points = 64);

/// Smallest T such that prod_{s=0..T} [1 - p IH(z_active + r - 1, eps)
/// IH(k_t - r, (gamma - eps - 1/2) e^{lambda s})] <= delta_target, minimized
/// over eps. Throws CapExceeded when no grid point converges.
ReactionTime reaction_time_bound(int k_t, int r, int z_active, const TheoryParams& params,
                                 double delta_target, const ReactionTimeOptions& options = {});

/// Time until r_prime forks: sum over r < r_prime of the single-fork bound
/// with the confidence budget split evenly.
std::int64_t chained_reaction_time(int k_t, int r_prime, int z_active, const TheoryParams& params,
                                   double delta_total, const ReactionTimeOptions& options = {});

// ---------------------------------------------------------------------------
// Growth beyond z_bound walks without failures.

struct GrowthBound {
  double delta = 0.0;             // clamped to [0, 1]
  int n_max = 0;
  std::vector<double> t_schedule; // t_i for i = z0 .. z_bound-1
  double t_nofork = 0.0;
};

/// Phase length t_i = (1/mu) log(mu n / p+_i), clamped at 0.
double growth_phase_length(int i, const TheoryParams& params);

GrowthBound growth_prob_bound(int z_bound, double t_total, const TheoryParams& params);

/// Largest horizon whose growth probability bound stays within delta.
/// Infinite when forks are impossible.
double growth_time_bound(double delta, int z_bound, const TheoryParams& params);

// ---------------------------------------------------------------------------
// Overshoot after a failure.

/// Per-visit fork bound as a function of history; defaults to fork_prob_bound
/// (falling back to p when its precondition fails).
using ForkBoundFn = std::function<double(const EventHistory&)>;

struct OvershootSeries {
  std::vector<double> expected;  // E-bar[Z] at t_first_fork + k, k = 0..horizon
  bool precondition_always_met = true;
};

/// Linear-cost recursion E[t'] = ceil(E[t'-1]) (1 + pbar(t'-1)). The ceiling
/// makes the series grow by at least one per step once forks are possible,
/// so it does not converge.
OvershootSeries overshoot_approx(int z_start, double tau_t, double t_first_fork, int horizon,
                                 const TheoryParams& params, const ForkBoundFn& fork_bound = {});

/// Binary-prefix keyed thresholds ("" for the root, then "0", "1", "01", ...).
using OvershootThresholds = std::map<std::string, int>;

inline constexpr int kOvershootMaxDepth = 12;

/// Root threshold z, then child-0 keeps its parent's value and child-1 is
/// ceil(1.2 * parent) (at least parent + 1).
OvershootThresholds default_overshoot_thresholds(int z_after_failure, int depth);

/// Throws DomainError unless every prefix of length <= depth-2 is present and
/// child-1 > parent, child-0 <= 2 parent.
void validate_overshoot_thresholds(const OvershootThresholds& thresholds, int depth);

/// Path-enumeration bound on E[Z] at t_first_fork + depth. Enumerates all
/// 2^(depth-1) branch vectors.
double overshoot_exact(int z_after_failure, double t_first_fork, int depth,
                       const OvershootThresholds& thresholds, const TheoryParams& params,
                       double tau_t = 0.0, const ForkBoundFn& fork_bound = {});

/// P(n + Binomial(n, p) > threshold).
double binomial_growth_tail(int n, int threshold, double p);

}  // namespace rwres::theory
