// End-to-end acceptance checks. Prints one [PASS]/[FAIL] line per criterion
// and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rwres/harness.hpp"
#include "rwres/rng.hpp"
#include "rwres/theory.hpp"

namespace th = rwres::theory;
using rwres::AggregateTrace;
using rwres::ExperimentConfig;
using rwres::ExperimentResult;

namespace {

int g_failed = 0;
int g_threads = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(const char* id, const char* what, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++g_failed;
  std::printf("[%s] %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, what, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::map<std::string, ExperimentResult> run_preset(const std::string& name) {
  std::map<std::string, ExperimentResult> out;
  for (const auto& v : rwres::preset(name)) out[v.label] = rwres::run_experiment(v.config, g_threads);
  return out;
}

double window_mean(const AggregateTrace& a, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t t = lo; t <= hi; ++t) s += a.mean_z[t];
  return s / static_cast<double>(hi - lo + 1);
}

// First t in (from, from + limit] with mean_z inside [lo, hi]; -1 if none.
long first_inside(const AggregateTrace& a, std::size_t from, std::size_t limit, double lo,
                  double hi) {
  for (std::size_t t = from + 1; t <= std::min(from + limit, a.size() - 1); ++t)
    if (a.mean_z[t] >= lo && a.mean_z[t] <= hi) return static_cast<long>(t - from);
  return -1;
}

double max_frac_extinct(const AggregateTrace& a) {
  return *std::max_element(a.frac_extinct.begin(), a.frac_extinct.end());
}

// Largest trailing moving average of mean_z over `width` steps.
double peak_moving_mean(const AggregateTrace& a, std::size_t from, std::size_t width) {
  double best = 0.0, sum = 0.0;
  for (std::size_t t = from; t < a.size(); ++t) {
    sum += a.mean_z[t];
    if (t >= from + width) sum -= a.mean_z[t - width];
    if (t + 1 >= from + width) best = std::max(best, sum / static_cast<double>(width));
  }
  return best;
}

double peak_mean(const AggregateTrace& a, std::size_t from) {
  return *std::max_element(a.mean_z.begin() + static_cast<long>(from), a.mean_z.end());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome ac1_estimator_mean() {
  ExperimentConfig c = rwres::preset("fig1")[1].config;
  c.policy.kind = rwres::PolicyKind::none;
  c.policy.survival_mode = rwres::SurvivalMode::analytical_exponential;
  c.failures = {};
  c.runs = 4;
  c.horizon = 3000;
  c.outputs.estimates = true;
  const auto r = rwres::run_experiment(c, g_threads);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& run : r.runs)
    for (const auto& e : run.trace.estimates) {
      sum += e.z_hat;
      ++n;
    }
  const double mean = sum / static_cast<double>(n);
  return {n >= 10'000 && mean >= 4.85 && mean <= 5.15,
          fmt("mean Z_hat %.4f over %zu decisions, target [4.85, 5.15]", mean, n)};
}

Outcome ac2_irwin_hall() {
  constexpr long kSamples = 10'000'000;
  rwres::Rng rng(2024);
  int checked = 0, bad = 0;
  double worst = 0.0;
  for (int m : {1, 2, 5, 9, 20}) {
    // Histogram on a fine grid, then read the CDF at the 50 sigma points.
    constexpr int kPoints = 50;
    std::vector<double> grid(kPoints);
    for (int k = 0; k < kPoints; ++k) grid[k] = m * (k + 0.5) / kPoints;
    std::vector<long> counts(kPoints, 0);
    for (long s = 0; s < kSamples; ++s) {
      double x = 0.0;
      for (int j = 0; j < m; ++j) x += rng.uniform();
      const auto k = static_cast<long>(std::ceil(x * kPoints / m - 0.5));
      if (k < kPoints) ++counts[static_cast<std::size_t>(std::max(0L, k))];
    }
    long acc = 0;
    for (int k = 0; k < kPoints; ++k) {
      acc += counts[k];
      const double emp = static_cast<double>(acc) / kSamples;
      const double cf = th::irwin_hall_cdf(m, grid[k]);
      const double sd = std::sqrt(std::max(cf * (1 - cf), 1e-300) / kSamples);
      const double z = std::abs(emp - cf) / sd;
      worst = std::max(worst, z);
      ++checked;
      if (!(std::abs(emp - cf) < 3 * sd)) ++bad;
    }
  }
  // Brute-force spot value: the two nonzero terms of the alternating sum in
  // long double.
  const long double brute =
      (std::pow(1.5L, 9) - 9.0L * std::pow(0.5L, 9)) / 362880.0L;
  const double spot = th::irwin_hall_cdf(9, 1.5);
  const bool spot_ok = std::abs(spot - static_cast<double>(brute)) <= 1e-15 * spot;
  return {bad == 0 && spot_ok,
          fmt("%d/%d grid points within 3 sd (worst %.2f sd); F_9(1.5) = %.17g vs brute %.17g",
              checked - bad, checked, worst, spot, static_cast<double>(brute))};
}

Outcome ac3_forked_law() {
  constexpr int kSamples = 1'000'000;
  const double lambdas[] = {0.02, 0.05, 0.1};
  const double mus[] = {0.01, 0.07, 0.25};
  const double spans[] = {10.0, 50.0, 200.0};
  const double age = 20.0;  // t - tau_T
  double worst_sup = 0, worst_mean = 0, worst_var = 0, worst_pub_rel = 0, worst_fix_rel = 0;
  std::uint64_t seed = 1;
  for (double l : lambdas)
    for (double mu : mus)
      for (double span : spans) {
        const double tf = 0.0, tt = span, t = span + age;
        rwres::Rng rng(seed++);
        std::vector<double> xs(kSamples);
        for (double& v : xs) {
          double visit = tf + rng.exponential(mu);
          if (visit >= tt) {
            v = 0.0;
            continue;
          }
          for (double next = visit + rng.exponential(l); next < tt; next += rng.exponential(l))
            visit = next;
          v = std::exp(-l * (t - visit));
        }
        double mean = 0, var = 0;
        for (double v : xs) mean += v;
        mean /= kSamples;
        for (double v : xs) var += (v - mean) * (v - mean);
        var /= kSamples;
        std::sort(xs.begin(), xs.end());
        double sup = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
          const double f = th::forked_cdf(xs[i], t, tf, tt, l, mu);
          const double lo = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), xs[i]) - xs.begin());
          const double below = th::forked_cdf(std::nextafter(xs[i], -1.0), t, tf, tt, l, mu);
          sup = std::max({sup, std::abs(f - (i + 1.0) / kSamples), std::abs(below - lo / kSamples)});
        }
        const double v_fix = th::forked_var(t, tf, tt, l, mu);
        const double v_pub = th::forked_var_as_published(t, tf, tt, l, mu);
        worst_sup = std::max(worst_sup, sup);
        worst_mean = std::max(worst_mean, std::abs(mean - th::forked_mean(t, tf, tt, l, mu)));
        worst_var = std::max(worst_var, std::abs(var - v_fix));
        if (var > 1e-6) {
          worst_fix_rel = std::max(worst_fix_rel, std::abs(v_fix - var) / var);
          worst_pub_rel = std::max(worst_pub_rel, std::abs(v_pub - var) / var);
        }
      }
  const bool pass = worst_sup < 0.01 && worst_mean < 0.01 && worst_var < 0.01;
  std::printf(
      "[FLAG] AC3 theory flag: printed variance expression (sign of the e^{-mu(tau_T-tau_F)} term) "
      "deviates from the oracle by up to %.0f%% relative; corrected sign deviates by %.2f%%\n",
      100 * worst_pub_rel, 100 * worst_fix_rel);
  return {pass, fmt("27 cells: max sup-distance %.4f, max |dmean| %.5f, max |dvar| %.6f", worst_sup,
                    worst_mean, worst_var)};
}

Outcome ac4_fig1(const std::map<std::string, ExperimentResult>& fig1) {
  const auto& df = fig1.at("decafork").aggregate;
  const auto& dp = fig1.at("decafork_plus").aggregate;
  const auto& mp = fig1.at("missing_person").aggregate;
  const long df1 = first_inside(df, 2000, 2000, 8, 12), df2 = first_inside(df, 6000, 2000, 8, 12);
  const long dp1 = first_inside(dp, 2000, 1000, 8, 12), dp2 = first_inside(dp, 6000, 1000, 8, 12);
  const int df_min = *std::min_element(df.min_z.begin(), df.min_z.end());
  const double mp_peak = peak_mean(mp, 2000);
  const bool pass = df1 >= 0 && df2 >= 0 && df_min > 0 && dp1 >= 0 && dp2 >= 0 && mp_peak > 12;
  return {pass, fmt("DecAFork back in [8,12] after %ld/%ld steps, min Z %d; DecAFork+ after "
                    "%ld/%ld steps; MissingPerson peak mean %.2f",
                    df1, df2, df_min, dp1, dp2, mp_peak)};
}

Outcome ac5_fig2(const std::map<std::string, ExperimentResult>& fig2) {
  const auto& plus = fig2.at("decafork_plus_pf0.0002").aggregate;
  const auto& df = fig2.at("decafork_pf0.001").aggregate;
  const double plus_ss = window_mean(plus, 8000, 10000);
  const double df_ss = window_mean(df, 8000, 10000);
  const double df_ext = max_frac_extinct(df);
  const bool pass = plus_ss >= 8 && plus_ss <= 12 && df_ss < 10 && df_ext == 0.0;
  return {pass, fmt("DecAFork+ (p_f=0.0002) steady mean %.2f in [8,12]; DecAFork (p_f=0.001) "
                    "steady mean %.2f < 10, extinct runs %.0f%%",
                    plus_ss, df_ss, 100 * df_ext)};
}

Outcome ac6_fig3(const std::map<std::string, ExperimentResult>& fig3) {
  const auto& plus = fig3.at("decafork_plus").aggregate;
  const auto& df2 = fig3.at("decafork_gamma2").aggregate;
  const double survived = 1.0 - plus.frac_extinct.back();
  const double recovered = window_mean(plus, 9000, 10000);
  const double peak_smooth = peak_moving_mean(plus, 0, 200);
  const double peak_raw = peak_mean(plus, 0);
  const double df_ext = df2.frac_extinct.back();
  const bool pass = survived >= 0.95 && recovered >= 8 && recovered <= 12 && peak_smooth <= 14 &&
                    df_ext > 0;
  return {pass, fmt("DecAFork+ alive in %.0f%% of runs, No-Byz mean %.2f, peak 200-step mean %.2f "
                    "(pointwise %.2f); DecAFork gamma=2 extinct in %.0f%% of runs",
                    100 * survived, recovered, peak_smooth, peak_raw, 100 * df_ext)};
}

Outcome ac7_fig5(const std::map<std::string, ExperimentResult>& fig5) {
  const char* labels[] = {"gamma1.75", "gamma2", "gamma2.25", "gamma2.5"};
  std::vector<long> recovery;
  std::vector<double> steady;
  for (const char* l : labels) {
    const auto& a = fig5.at(l).aggregate;
    recovery.push_back(first_inside(a, 2000, 8000, 9.0, 1e9));
    steady.push_back(window_mean(a, 8000, 10000));
  }
  bool pass = true;
  for (std::size_t i = 0; i < recovery.size(); ++i) {
    if (recovery[i] < 0) pass = false;
    if (i > 0 && recovery[i] > recovery[i - 1]) pass = false;
    if (i > 0 && steady[i] < steady[i - 1]) pass = false;
  }
  return {pass, fmt("recovery to 0.9 Z0: %ld, %ld, %ld, %ld steps; steady mean %.2f, %.2f, %.2f, %.2f",
                    recovery[0], recovery[1], recovery[2], recovery[3], steady[0], steady[1],
                    steady[2], steady[3])};
}

Outcome ac8_growth_bound() {
  ExperimentConfig c = rwres::preset("fig1")[1].config;
  const double gamma = th::design_thresholds(c.z0, 1e-4).gamma;
  c.policy.gamma = gamma;
  c.policy.survival_mode = rwres::SurvivalMode::analytical_exponential;
  c.failures = {};
  c.runs = 200;
  c.horizon = 5000;
  const auto r = rwres::run_experiment(c, g_threads);
  int over = 0;
  double lambda = 0, mu = 0;
  for (const auto& run : r.runs) {
    if (*std::max_element(run.trace.z_series.begin(), run.trace.z_series.end()) > c.z0 + 2) ++over;
    lambda += run.trace.lambda_hat;
    mu += run.trace.mu_hat;
  }
  th::TheoryParams p;
  p.lambda_r = lambda / c.runs;
  p.mu_h = mu / c.runs;
  p.z0 = c.z0;
  p.fork_prob = c.policy.effective_fork_prob();
  p.gamma = gamma;
  p.n = c.graph.n;
  const auto bound = th::growth_prob_bound(c.z0 + 2, static_cast<double>(c.horizon), p);
  const double frac = static_cast<double>(over) / c.runs;
  return {frac <= bound.delta, fmt("gamma %.4f, mu_hat %.5f: %d/%d runs exceeded %d walks (%.3f) "
                                   "vs bound %.4g",
                                   gamma, p.mu_h, over, c.runs, c.z0 + 2, frac, bound.delta)};
}

Outcome ac9_geometric_offset() {
  constexpr int kSamples = 1'000'000;
  const double q = 0.1;
  rwres::Rng rng(99);
  auto geometric = [&] {
    return static_cast<std::int64_t>(std::floor(std::log1p(-rng.uniform()) / std::log1p(-q))) + 1;
  };
  rwres::NodeState node;
  for (int i = 0; i < kSamples; ++i) node.return_samples().add(geometric());
  rwres::PolicyConfig cfg;
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i) sum += rwres::survival(node, geometric(), cfg);
  const double mean = sum / kSamples;
  const double target = (1 - q) / (2 - q);
  cfg.offset_mode = rwres::OffsetMode::geometric_corrected;
  cfg.q = q;
  const bool pass = std::abs(mean - target) <= 0.003 && std::abs(cfg.offset() - target) < 1e-15;
  return {pass, fmt("mean survival %.5f vs (1-q)/(2-q) = %.5f", mean, target)};
}

Outcome ac10_determinism(const ExperimentConfig& c) {
  const auto base = std::filesystem::temp_directory_path() / "rwres_acceptance";
  std::filesystem::remove_all(base);
  rwres::write_outputs(rwres::run_experiment(c, 1), base / "serial");
  rwres::write_outputs(rwres::run_experiment(c, 8), base / "parallel");
  const std::string a = slurp(base / "serial" / "aggregate.csv");
  const std::string b = slurp(base / "parallel" / "aggregate.csv");
  std::filesystem::remove_all(base);
  return {!a.empty() && a == b,
          fmt("aggregate.csv %zu bytes, serial %s parallel(8)", a.size(), a == b ? "==" : "!=")};
}

}  // namespace

int main() {
  g_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  report("AC1", "estimator mean", ac1_estimator_mean);
  report("AC2", "Irwin-Hall oracle", ac2_irwin_hall);
  report("AC3", "forked-walk law", ac3_forked_law);

  std::map<std::string, ExperimentResult> fig1, fig2, fig3, fig5;
  report("AC4", "fig1 burst resilience", [&] {
    fig1 = run_preset("fig1");
    return ac4_fig1(fig1);
  });
  report("AC5", "fig2 probabilistic failures", [&] {
    fig2 = run_preset("fig2");
    return ac5_fig2(fig2);
  });
  report("AC6", "fig3 Byzantine node", [&] {
    fig3 = run_preset("fig3");
    return ac6_fig3(fig3);
  });
  report("AC7", "fig5 gamma trade-off", [&] {
    fig5 = run_preset("fig5");
    return ac7_fig5(fig5);
  });
  report("AC8", "growth bound", ac8_growth_bound);
  report("AC9", "geometric offset", ac9_geometric_offset);
  report("AC10", "determinism", [] { return ac10_determinism(rwres::preset("fig1")[2].config); });

  std::printf("%d of 10 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
