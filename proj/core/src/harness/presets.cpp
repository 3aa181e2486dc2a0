#include <string>

#include "rwres/errors.hpp"
#include "rwres/harness.hpp"

namespace rwres {
namespace {

// 8-regular graph on 100 nodes, ten walks, bursts of 5 and 6 walks.
ExperimentConfig base_config() {
  ExperimentConfig c;
  c.graph.family = GraphFamily::random_regular;
  c.graph.n = 100;
  c.graph.degree = 8;
  c.z0 = 10;
  c.policy.z0 = 10;
  c.horizon = 10'000;
  c.runs = 50;
  c.seed = 1;
  c.failures.bursts = {{2000, 5}, {6000, 6}};
  return c;
}

ExperimentConfig with_decafork(ExperimentConfig c, double gamma) {
  c.policy.kind = PolicyKind::decafork;
  c.policy.gamma = gamma;
  return c;
}

ExperimentConfig with_decafork_plus(ExperimentConfig c, double gamma, double gamma_term) {
  c.policy.kind = PolicyKind::decafork_plus;
  c.policy.gamma = gamma;
  c.policy.gamma_term = gamma_term;
  return c;
}

std::string fmt(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

std::vector<PresetVariant> fig1() {
  ExperimentConfig mp = base_config();
  mp.policy.kind = PolicyKind::missing_person;
  // Hand-tuned: short enough to react, long enough that the ten walks do
  // not trigger replacements before the first burst.
  mp.policy.t_mp = 1500;
  return {{"missing_person", mp},
          {"decafork", with_decafork(base_config(), 2.0)},
          {"decafork_plus", with_decafork_plus(base_config(), 3.25, 5.75)}};
}

std::vector<PresetVariant> fig2() {
  std::vector<PresetVariant> out;
  for (double pf : {0.001, 0.0002}) {
    ExperimentConfig c = base_config();
    c.failures.p_fail = pf;
    out.push_back({"decafork_pf" + fmt(pf), with_decafork(c, 2.0)});
    out.push_back({"decafork_plus_pf" + fmt(pf), with_decafork_plus(c, 3.25, 5.75)});
  }
  return out;
}

// The Byzantine node kills arrivals on [2000, 5000) and behaves honestly
// afterwards; the chain itself is frozen (p_transit = 0).
FailurePlan byzantine_plan() {
  FailurePlan f = base_config().failures;
  ByzantineConfig byz;
  byz.node = 0;
  byz.p_transit = 0.0;
  byz.initial_state = ByzState::no_byz;
  byz.schedule_override = {{2000, ByzState::byz}, {5000, ByzState::no_byz}};
  f.byzantine = byz;
  return f;
}

std::vector<PresetVariant> fig3() {
  ExperimentConfig c = base_config();
  c.failures = byzantine_plan();
  return {{"decafork_gamma2", with_decafork(c, 2.0)},
          {"decafork_gamma3.25", with_decafork(c, 3.25)},
          {"decafork_plus", with_decafork_plus(c, 3.25, 5.75)}};
}

std::vector<PresetVariant> fig4() {
  std::vector<PresetVariant> out;
  const std::pair<int, double> pairs[] = {{50, 1.85}, {100, 2.0}, {200, 2.1}};
  for (const auto& [n, gamma] : pairs) {
    ExperimentConfig c = with_decafork(base_config(), gamma);
    c.graph.n = n;
    out.push_back({"n" + std::to_string(n) + "_gamma" + fmt(gamma), c});
  }
  return out;
}

std::vector<PresetVariant> fig5() {
  std::vector<PresetVariant> out;
  for (double gamma : {1.75, 2.0, 2.25, 2.5}) {
    out.push_back({"gamma" + fmt(gamma), with_decafork(base_config(), gamma)});
  }
  return out;
}

std::vector<PresetVariant> fig6() {
  std::vector<PresetVariant> out;
  for (GraphFamily family : {GraphFamily::complete, GraphFamily::random_regular,
                             GraphFamily::erdos_renyi, GraphFamily::power_law}) {
    for (double gamma : {1.9, 2.0, 2.1}) {
      ExperimentConfig c = with_decafork(base_config(), gamma);
      c.graph.family = family;
      c.graph.edge_prob = 0.08;
      c.graph.attachment = 4;
      out.push_back({std::string(to_string(family)) + "_gamma" + fmt(gamma), c});
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
  return names;
}

std::vector<PresetVariant> preset(std::string_view name) {
  if (name == "fig1") return fig1();
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  if (name == "fig4") return fig4();
  if (name == "fig5") return fig5();
  if (name == "fig6") return fig6();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace rwres
