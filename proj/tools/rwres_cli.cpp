// rwres: run walk-redundancy experiments and evaluate the analytical bounds.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#ifdef RWRES_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "rwres/errors.hpp"
#include "rwres/harness.hpp"
#include "rwres/theory.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace th = rwres::theory;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunFlags {
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<long long> horizon;
  std::string out = "rwres_out";
  int parallel = 1;
  bool fixed_graph = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--runs", f.runs, "Number of independent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base seed (default: $RWRES_SEED, then the config)");
  cmd->add_option("--horizon", f.horizon, "Steps after warmup")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--parallel", f.parallel, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--fixed-graph", f.fixed_graph, "Use one graph instance for all runs");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("RWRES_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 0);
  if (*end != '\0') throw rwres::ConfigError("RWRES_SEED is not an integer");
  return v;
}

void apply_run_flags(rwres::ExperimentConfig& c, const RunFlags& f) {
  if (f.runs) c.runs = *f.runs;
  if (f.seed) {
    c.seed = *f.seed;
  } else if (auto s = env_seed()) {
    c.seed = *s;
  }
  if (f.horizon) c.horizon = *f.horizon;
  if (f.fixed_graph) c.fixed_graph = true;
}

void summarize(const std::string& label, const rwres::ExperimentResult& r) {
  const auto& a = r.aggregate;
  double peak = 0.0;
  for (double m : a.mean_z) peak = std::max(peak, m);
  std::cout << label << ": runs=" << r.runs.size() << " final_mean_z=" << num(a.mean_z.back())
            << " peak_mean_z=" << num(peak) << " frac_extinct=" << num(a.frac_extinct.back())
            << '\n';
}

// Flags shared by the theory subcommands.
struct TheoryFlags {
  th::TheoryParams params;
  int active = 10;
  std::vector<std::string> terminations;
  std::vector<std::string> forks;
  double now = 0.0;
  bool as_json = false;
};

void add_param_flags(CLI::App* cmd, TheoryFlags& f) {
  cmd->add_option("--lambda", f.params.lambda_r, "Return rate")->capture_default_str();
  cmd->add_option("--mu", f.params.mu_h, "First-hitting rate")->capture_default_str();
  cmd->add_option("--z0", f.params.z0, "Target walk count")->capture_default_str();
  cmd->add_option("--p", f.params.fork_prob, "Per-visit fork probability")->capture_default_str();
  cmd->add_option("--gamma", f.params.gamma, "Fork threshold")->capture_default_str();
  cmd->add_option("--gamma-term", f.params.gamma_term, "Termination threshold")
      ->capture_default_str();
  cmd->add_option("--n", f.params.n, "Node count")->capture_default_str();
  cmd->add_flag("--json", f.as_json, "Print a JSON object");
}

void add_history_flags(CLI::App* cmd, TheoryFlags& f) {
  cmd->add_option("--active", f.active, "Walks active throughout")->capture_default_str();
  cmd->add_option("--term", f.terminations, "Termination group TIME:COUNT (repeatable)");
  cmd->add_option("--fork", f.forks, "Fork group TIME:COUNT (repeatable)");
  cmd->add_option("--now", f.now, "Evaluation time")->capture_default_str();
}

std::vector<std::pair<double, int>> parse_groups(const std::vector<std::string>& items) {
  std::vector<std::pair<double, int>> out;
  for (const std::string& s : items) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw rwres::ConfigError("expected TIME:COUNT, got '" + s + "'");
    try {
      out.emplace_back(std::stod(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
    } catch (const std::exception&) {
      throw rwres::ConfigError("expected TIME:COUNT, got '" + s + "'");
    }
  }
  return out;
}

th::EventHistory history(const TheoryFlags& f) {
  th::EventHistory h;
  h.active_count = f.active;
  h.terminations = parse_groups(f.terminations);
  h.forks = parse_groups(f.forks);
  h.now = f.now;
  return h;
}

void emit(const TheoryFlags& f, const json& j, double plain) {
  if (f.as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << num(plain) << '\n';
  }
}

void emit_object(const json& j) { std::cout << j.dump(2) << '\n'; }

json bound_json(const th::BoundResult& b) {
  return json{{"value", b.value}, {"precondition_met", b.precondition_met}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate random-walk redundancy control and evaluate its bounds"};
  app.require_subcommand(1);

  // simulate
  std::string config_path;
  RunFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment from a JSON config");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_run_flags(simulate, sim_flags);

  // preset
  std::string preset_name;
  RunFlags preset_flags;
  auto* preset = app.add_subcommand("preset", "Run a figure preset; one directory per variant");
  preset->add_option("name", preset_name, "fig1 .. fig6")
      ->required()
      ->check(CLI::IsMember(rwres::preset_names()));
  add_run_flags(preset, preset_flags);
  bool print_config = false;
  preset->add_flag("--print-config", print_config, "Print variant configs and exit");

  // theory
  auto* theory = app.add_subcommand("theory", "Evaluate distributions and bounds");
  theory->require_subcommand(1);
  TheoryFlags tf;

  int ih_m = 9;
  double ih_sigma = 1.5;
  auto* ih = theory->add_subcommand("irwin-hall", "CDF of a sum of m uniforms");
  ih->add_option("--m", ih_m, "Number of uniforms")->required();
  ih->add_option("--sigma", ih_sigma, "Argument")->required();
  ih->add_flag("--json", tf.as_json, "Print a JSON object");

  int sf_k = 1;
  double sf_sigma = 0.0, sf_elapsed = 0.0;
  auto* sf = theory->add_subcommand("scaled-failed", "CDF contribution of walks that failed together");
  sf->add_option("--k", sf_k, "Failed walks")->required();
  sf->add_option("--sigma", sf_sigma, "Argument")->required();
  sf->add_option("--elapsed", sf_elapsed, "Steps since the failure")->required();
  add_param_flags(sf, tf);

  double design_delta = 1e-4;
  auto* design = theory->add_subcommand("design", "Thresholds for a target misfire probability");
  design->add_option("--z0", tf.params.z0, "Target walk count")->required();
  design->add_option("--delta", design_delta, "Target probability")->required();

  double fk_t = 0.0, fk_tau_f = 0.0, fk_tau_t = 0.0;
  std::optional<double> fk_x;
  auto* forked = theory->add_subcommand("forked", "Law of a forked walk's survival value");
  forked->add_option("--t", fk_t, "Evaluation time")->required();
  forked->add_option("--tau-f", fk_tau_f, "Fork time")->required();
  forked->add_option("--tau-t", fk_tau_t, "Termination time (use --t for an active walk)")->required();
  forked->add_option("--x", fk_x, "Also evaluate the CDF at x");
  add_param_flags(forked, tf);

  auto* expected = theory->add_subcommand("expected", "Mean and variance of the estimate");
  add_param_flags(expected, tf);
  add_history_flags(expected, tf);

  auto* fork_bound = theory->add_subcommand("fork-bound", "Per-visit fork probability bound");
  add_param_flags(fork_bound, tf);
  add_history_flags(fork_bound, tf);

  auto* term_bound = theory->add_subcommand("term-bound", "Per-visit termination probability bound");
  add_param_flags(term_bound, tf);
  add_history_flags(term_bound, tf);

  int pf_i = 10;
  auto* pfork = theory->add_subcommand("pfork-plus", "Fork probability bound with i walks");
  pfork->add_option("--i", pf_i, "Walk count")->required();
  add_param_flags(pfork, tf);

  int rt_kt = 1, rt_r = 0, rt_z = 1;
  double rt_delta = 0.5;
  std::optional<int> rt_chain;
  long long rt_cap = 10'000'000;
  auto* reaction = theory->add_subcommand("reaction", "Steps until a fork after a failure");
  reaction->add_option("--k-t", rt_kt, "Walks lost in the failure")->required();
  reaction->add_option("--r", rt_r, "Forks already made")->capture_default_str();
  reaction->add_option("--z-active", rt_z, "Survivors")->required();
  reaction->add_option("--delta", rt_delta, "Target probability of no fork")->capture_default_str();
  reaction->add_option("--chain", rt_chain, "Total steps until this many forks");
  reaction->add_option("--step-cap", rt_cap, "Give up after this many steps")->capture_default_str();
  add_param_flags(reaction, tf);

  int gr_z = 12;
  double gr_t = 10'000.0;
  auto* growth = theory->add_subcommand("growth", "Probability of exceeding z walks by t-total");
  growth->add_option("--z", gr_z, "Walk bound")->required();
  growth->add_option("--t-total", gr_t, "Horizon")->required();
  add_param_flags(growth, tf);

  double gt_delta = 0.1;
  auto* growth_time = theory->add_subcommand("growth-time", "Horizon with growth probability delta");
  growth_time->add_option("--z", gr_z, "Walk bound")->required();
  growth_time->add_option("--delta", gt_delta, "Probability budget")->required();
  add_param_flags(growth_time, tf);

  int os_z = 5, os_h = 10, os_depth = 3;
  double os_tau_t = 0.0, os_t1 = 0.0;
  auto* os_approx = theory->add_subcommand("overshoot-approx", "Approximate post-failure walk count series");
  os_approx->add_option("--z-start", os_z, "Survivors")->required();
  os_approx->add_option("--tau-t", os_tau_t, "Failure time")->capture_default_str();
  os_approx->add_option("--t-first-fork", os_t1, "First fork time")->required();
  os_approx->add_option("--horizon", os_h, "Steps")->capture_default_str();
  add_param_flags(os_approx, tf);

  auto* os_exact = theory->add_subcommand("overshoot-exact", "Path-enumeration overshoot bound");
  os_exact->add_option("--z", os_z, "Walks after the failure")->required();
  os_exact->add_option("--tau-t", os_tau_t, "Failure time")->capture_default_str();
  os_exact->add_option("--t-first-fork", os_t1, "First fork time")->required();
  os_exact->add_option("--depth", os_depth, "Steps (at most 12)")->capture_default_str();
  add_param_flags(os_exact, tf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      rwres::ExperimentConfig c = rwres::load_config(config_path);
      apply_run_flags(c, sim_flags);
      const rwres::ExperimentResult r = rwres::run_experiment(c, sim_flags.parallel);
      rwres::write_outputs(r, sim_flags.out);
      summarize(sim_flags.out, r);
      return 0;
    }
    if (*preset) {
      for (rwres::PresetVariant& v : rwres::preset(preset_name)) {
        apply_run_flags(v.config, preset_flags);
        if (print_config) {
          std::cout << "# " << v.label << '\n' << rwres::config_to_json(v.config);
          continue;
        }
        const auto dir = std::filesystem::path(preset_flags.out) / v.label;
        const rwres::ExperimentResult r = rwres::run_experiment(v.config, preset_flags.parallel);
        rwres::write_outputs(r, dir);
        summarize(v.label, r);
      }
      return 0;
    }

    // theory
    const th::TheoryParams& p = tf.params;
    if (*ih) {
      const double v = th::irwin_hall_cdf(ih_m, ih_sigma);
      emit(tf, json{{"m", ih_m}, {"sigma", ih_sigma}, {"cdf", v}}, v);
    } else if (*sf) {
      const double v = th::scaled_failed_cdf(sf_k, sf_sigma, p.lambda_r, sf_elapsed);
      emit(tf, json{{"cdf", v}}, v);
    } else if (*design) {
      const th::Thresholds t = th::design_thresholds(p.z0, design_delta);
      emit_object(json{{"gamma", t.gamma}, {"gamma_term", t.gamma_term}});
    } else if (*forked) {
      json j{{"mean", th::forked_mean(fk_t, fk_tau_f, fk_tau_t, p.lambda_r, p.mu_h)}};
      j["var"] = th::forked_var(fk_t, fk_tau_f, fk_tau_t, p.lambda_r, p.mu_h);
      j["var_as_published"] = th::forked_var_as_published(fk_t, fk_tau_f, fk_tau_t, p.lambda_r, p.mu_h);
      if (fk_x) j["cdf"] = th::forked_cdf(*fk_x, fk_t, fk_tau_f, fk_tau_t, p.lambda_r, p.mu_h);
      emit_object(j);
    } else if (*expected) {
      const th::EventHistory h = history(tf);
      emit_object(json{{"mean", th::expected_estimate(h, p)},
                       {"variance", th::estimate_variance(h, p)},
                       {"note", "the mean tracks half the walk count"}});
    } else if (*fork_bound) {
      const th::BoundResult b = th::fork_prob_bound(history(tf), p);
      emit(tf, bound_json(b), b.value);
      if (!b.precondition_met) std::cerr << "warning: E[Z_hat] <= gamma, bound is trivial\n";
    } else if (*term_bound) {
      const th::BoundResult b = th::term_prob_bound(history(tf), p);
      emit(tf, bound_json(b), b.value);
      if (!b.precondition_met) std::cerr << "warning: E[Z_hat] >= gamma_term, bound is trivial\n";
    } else if (*pfork) {
      const double v = th::pfork_plus(pf_i, p);
      emit(tf, json{{"pfork_plus", v}}, v);
    } else if (*reaction) {
      th::ReactionTimeOptions opt;
      opt.step_cap = rt_cap;
      if (rt_chain) {
        const auto steps = th::chained_reaction_time(rt_kt, *rt_chain, rt_z, p, rt_delta, opt);
        emit(tf, json{{"steps", steps}}, static_cast<double>(steps));
      } else {
        const th::ReactionTime r = th::reaction_time_bound(rt_kt, rt_r, rt_z, p, rt_delta, opt);
        emit(tf, json{{"steps", r.steps}, {"eps", r.eps}}, static_cast<double>(r.steps));
      }
    } else if (*growth) {
      const th::GrowthBound g = th::growth_prob_bound(gr_z, gr_t, p);
      emit(tf,
           json{{"delta", g.delta}, {"n_max", g.n_max}, {"t_nofork", g.t_nofork},
                {"t_schedule", g.t_schedule}},
           g.delta);
    } else if (*growth_time) {
      const double t = th::growth_time_bound(gt_delta, gr_z, p);
      emit(tf, json{{"t_total", t}}, t);
    } else if (*os_approx) {
      const th::OvershootSeries s = th::overshoot_approx(os_z, os_tau_t, os_t1, os_h, p);
      emit_object(json{{"expected", s.expected}, {"precondition_always_met", s.precondition_always_met}});
    } else if (*os_exact) {
      const auto thresholds = th::default_overshoot_thresholds(os_z, os_depth);
      const double v = th::overshoot_exact(os_z, os_t1, os_depth, thresholds, p, os_tau_t);
      emit(tf, json{{"bound", v}}, v);
    }
    return 0;
  } catch (const rwres::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const th::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
