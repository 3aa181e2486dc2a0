#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "rwres/errors.hpp"
#include "rwres/harness.hpp"
#include "rwres/theory.hpp"

namespace rwres {
namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  return out;
}

// Evaluates `f`, mapping domain/cap failures to null.
template <typename F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const theory::DomainError&) {
    return nullptr;
  } catch (const RuntimeError&) {
    return nullptr;
  }
}

}  // namespace

void write_aggregate_csv(const AggregateTrace& a, std::ostream& out) {
  out << "t,mean_z,std_z,min_z,max_z,frac_extinct\n";
  for (std::size_t t = 0; t < a.size(); ++t) {
    out << t << ',' << num(a.mean_z[t]) << ',' << num(a.std_z[t]) << ',' << a.min_z[t] << ','
        << a.max_z[t] << ',' << num(a.frac_extinct[t]) << '\n';
  }
}

void write_run_csv(const RunTrace& trace, std::ostream& out) {
  out << "t,z\n";
  for (std::size_t t = 0; t < trace.z_series.size(); ++t) out << t << ',' << trace.z_series[t] << '\n';
}

void write_events_jsonl(std::span<const RunResult> runs, std::ostream& out) {
  for (const RunResult& r : runs) {
    for (const Event& e : r.trace.events) {
      out << "{\"run\":" << r.run << ",\"t\":" << e.t << ",\"kind\":\"" << to_string(e.kind)
          << "\",\"walk\":\"" << e.walk << "\",\"node\":" << e.node << "}\n";
    }
  }
}

void write_estimates_csv(std::span<const RunResult> runs, std::ostream& out) {
  out << "run,t,node,z_hat\n";
  for (const RunResult& r : runs) {
    for (const EstimateRecord& e : r.trace.estimates) {
      out << r.run << ',' << e.t << ',' << e.node << ',' << num(e.z_hat) << '\n';
    }
  }
}

std::string theory_summary_json(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  double lambda = 0.0;
  double mu = 0.0;
  int fitted = 0;
  for (const RunResult& r : result.runs) {
    if (r.trace.lambda_hat > 0.0 && r.trace.mu_hat > 0.0) {
      lambda += r.trace.lambda_hat;
      mu += r.trace.mu_hat;
      ++fitted;
    }
  }
  if (fitted > 0) {
    lambda /= fitted;
    mu /= fitted;
  }

  theory::TheoryParams p;
  p.lambda_r = lambda;
  p.mu_h = mu;
  p.z0 = c.z0;
  p.fork_prob = c.policy.effective_fork_prob();
  p.gamma = c.policy.gamma;
  p.gamma_term = c.policy.gamma_term;
  p.n = c.graph.n;

  theory::EventHistory equilibrium;
  equilibrium.active_count = c.z0;

  json j;
  j["lambda_hat"] = lambda;
  j["mu_hat"] = mu;
  j["runs_fitted"] = fitted;
  if (!result.runs.empty()) {
    const PolicyConfig& r = result.runs.front().trace.resolved_policy;
    j["resolved_policy_run0"] = json{{"fork_prob", r.fork_prob}, {"t_mp", r.t_mp},
                                     {"lambda", r.lambda}, {"q", r.q}};
  }
  j["fork_prob"] = p.fork_prob;
  j["gamma"] = p.gamma;
  j["gamma_term"] = p.gamma_term;
  // The fork threshold corresponds to this per-decision probability of
  // Z_hat < gamma with z0 walks at equilibrium; designing with it
  // reproduces gamma.
  j["implied_delta_star"] =
      guarded([&] { return json(theory::irwin_hall_cdf(c.z0 - 1, p.gamma - 0.5)); });
  j["designed_thresholds"] = guarded([&] {
    const double delta = theory::irwin_hall_cdf(c.z0 - 1, p.gamma - 0.5);
    const theory::Thresholds t = theory::design_thresholds(c.z0, delta);
    return json{{"delta_star", delta}, {"gamma", t.gamma}, {"gamma_term", t.gamma_term}};
  });
  j["equilibrium_fork_bound"] = guarded([&] {
    const theory::BoundResult b = theory::fork_prob_bound(equilibrium, p);
    return json{{"value", b.value}, {"precondition_met", b.precondition_met}};
  });
  j["equilibrium_term_bound"] = guarded([&] {
    const theory::BoundResult b = theory::term_prob_bound(equilibrium, p);
    return json{{"value", b.value}, {"precondition_met", b.precondition_met}};
  });
  j["pfork_plus_z0"] = guarded([&] { return json(theory::pfork_plus(c.z0, p)); });
  j["growth_bound_z0_plus_2"] = guarded([&] {
    const theory::GrowthBound g =
        theory::growth_prob_bound(c.z0 + 2, static_cast<double>(c.horizon), p);
    return json{{"z_bound", c.z0 + 2}, {"t_total", c.horizon}, {"delta", g.delta}, {"n_max", g.n_max}};
  });
  j["flags"] = json::array(
      {"estimator_convention: expected Z_hat tracks half the walk count (Z/2); the "
       "asymptotic unbiasedness statement for Z itself is inconsistent with this and "
       "is not used",
       "forked_var: the variance expression is evaluated with a corrected sign on its "
       "exp(-mu (tau_T - tau_F)) term; the uncorrected form disagrees with simulation"});
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create " + dir.string() + ": " + ec.message());

  {
    auto out = open_out(dir / "aggregate.csv");
    write_aggregate_csv(result.aggregate, out);
  }
  {
    auto out = open_out(dir / "config.json");
    out << config_to_json(result.config);
  }
  {
    auto out = open_out(dir / "theory.json");
    out << theory_summary_json(result);
  }
  const OutputOptions& o = result.config.outputs;
  if (o.trace_csv) {
    for (const RunResult& r : result.runs) {
      auto out = open_out(dir / ("run_" + std::to_string(r.run) + ".csv"));
      write_run_csv(r.trace, out);
    }
  }
  if (o.events_jsonl) {
    auto out = open_out(dir / "events.jsonl");
    write_events_jsonl(result.runs, out);
  }
  if (o.estimates) {
    auto out = open_out(dir / "estimates.csv");
    write_estimates_csv(result.runs, out);
  }
}

}  // namespace rwres
