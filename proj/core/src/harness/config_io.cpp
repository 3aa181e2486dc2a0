#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>

#include "rwres/errors.hpp"
#include "rwres/harness.hpp"

namespace rwres {
namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename Enum, typename Parse>
void read_enum(const json& obj, const char* key, Enum& out, Parse parse, const std::string& where) {
  std::string name;
  read(obj, key, name, where);
  if (name.empty()) return;
  try {
    out = parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json graph_to_json(const GraphSpec& g) {
  return json{{"family", std::string(to_string(g.family))},
              {"n", g.n},
              {"degree", g.degree},
              {"edge_prob", g.edge_prob},
              {"attachment", g.attachment},
              {"seed", g.seed}};
}

GraphSpec graph_from_json(const json& j) {
  reject_unknown(j, {"family", "n", "degree", "edge_prob", "attachment", "seed"}, "graph");
  GraphSpec g;
  read_enum(j, "family", g.family, parse_graph_family, "graph");
  read(j, "n", g.n, "graph");
  read(j, "degree", g.degree, "graph");
  read(j, "edge_prob", g.edge_prob, "graph");
  read(j, "attachment", g.attachment, "graph");
  read(j, "seed", g.seed, "graph");
  return g;
}

json policy_to_json(const PolicyConfig& p) {
  return json{{"kind", std::string(to_string(p.kind))},
              {"z0", p.z0},
              {"gamma", p.gamma},
              {"gamma_term", p.gamma_term},
              {"t_mp", p.t_mp},
              {"fork_prob", p.fork_prob},
              {"survival_mode", std::string(to_string(p.survival_mode))},
              {"lambda", p.lambda},
              {"offset_mode", std::string(to_string(p.offset_mode))},
              {"q", p.q}};
}

PolicyConfig policy_from_json(const json& j) {
  reject_unknown(j,
                 {"kind", "z0", "gamma", "gamma_term", "t_mp", "fork_prob", "survival_mode",
                  "lambda", "offset_mode", "q"},
                 "policy");
  PolicyConfig p;
  read_enum(j, "kind", p.kind, parse_policy_kind, "policy");
  read(j, "z0", p.z0, "policy");
  read(j, "gamma", p.gamma, "policy");
  read(j, "gamma_term", p.gamma_term, "policy");
  read(j, "t_mp", p.t_mp, "policy");
  read(j, "fork_prob", p.fork_prob, "policy");
  read_enum(j, "survival_mode", p.survival_mode, parse_survival_mode, "policy");
  read(j, "lambda", p.lambda, "policy");
  read_enum(j, "offset_mode", p.offset_mode, parse_offset_mode, "policy");
  read(j, "q", p.q, "policy");
  return p;
}

json failures_to_json(const FailurePlan& f) {
  json bursts = json::array();
  for (const Burst& b : f.bursts) bursts.push_back(json{{"t", b.t}, {"count", b.count}});
  json out{{"bursts", bursts}, {"p_fail", f.p_fail}, {"byzantine", nullptr}};
  if (f.byzantine) {
    const ByzantineConfig& b = *f.byzantine;
    json schedule = json::array();
    for (const auto& [t, state] : b.schedule_override) {
      schedule.push_back(json{{"t", t}, {"state", std::string(to_string(state))}});
    }
    out["byzantine"] = json{{"node", b.node},
                            {"p_transit", b.p_transit},
                            {"initial_state", std::string(to_string(b.initial_state))},
                            {"schedule_override", schedule}};
  }
  return out;
}

FailurePlan failures_from_json(const json& j) {
  reject_unknown(j, {"bursts", "p_fail", "byzantine"}, "failures");
  FailurePlan f;
  if (auto it = j.find("bursts"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("failures.bursts: expected an array");
    for (const json& b : *it) {
      reject_unknown(b, {"t", "count"}, "failures.bursts[]");
      Burst burst;
      read(b, "t", burst.t, "failures.bursts[]");
      read(b, "count", burst.count, "failures.bursts[]");
      f.bursts.push_back(burst);
    }
  }
  read(j, "p_fail", f.p_fail, "failures");
  if (auto it = j.find("byzantine"); it != j.end() && !it->is_null()) {
    const std::string where = "failures.byzantine";
    reject_unknown(*it, {"node", "p_transit", "initial_state", "schedule_override"}, where);
    ByzantineConfig b;
    read(*it, "node", b.node, where);
    read(*it, "p_transit", b.p_transit, where);
    read_enum(*it, "initial_state", b.initial_state, parse_byz_state, where);
    if (auto s = it->find("schedule_override"); s != it->end()) {
      if (!s->is_array()) throw ConfigError(where + ".schedule_override: expected an array");
      for (const json& e : *s) {
        reject_unknown(e, {"t", "state"}, where + ".schedule_override[]");
        TimeStep t = 0;
        ByzState state = ByzState::no_byz;
        read(e, "t", t, where);
        read_enum(e, "state", state, parse_byz_state, where);
        b.schedule_override.emplace_back(t, state);
      }
    }
    f.byzantine = b;
  }
  return f;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (z0 < 1) throw ConfigError("z0 must be at least 1");
  if (policy.z0 != z0) throw ConfigError("policy.z0 must equal z0");
  if (warmup_cap < 1) throw ConfigError("warmup_cap must be at least 1");
  graph.validate();
  policy.validate();
  failures.validate(graph.n);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j{{"graph", graph_to_json(c.graph)},
         {"policy", policy_to_json(c.policy)},
         {"failures", failures_to_json(c.failures)},
         {"z0", c.z0},
         {"placement", std::string(to_string(c.placement))},
         {"horizon", c.horizon},
         {"runs", c.runs},
         {"seed", c.seed},
         {"outputs",
          json{{"trace_csv", c.outputs.trace_csv},
               {"events_jsonl", c.outputs.events_jsonl},
               {"estimates", c.outputs.estimates}}},
         {"warmup_cap", c.warmup_cap},
         {"fixed_graph", c.fixed_graph},
         {"local_knowledge", c.local_knowledge}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"graph", "policy", "failures", "z0", "placement", "horizon", "runs", "seed",
                  "outputs", "warmup_cap", "fixed_graph", "local_knowledge"},
                 "config");
  ExperimentConfig c;
  if (auto it = j.find("graph"); it != j.end()) c.graph = graph_from_json(*it);
  if (auto it = j.find("policy"); it != j.end()) c.policy = policy_from_json(*it);
  if (auto it = j.find("failures"); it != j.end()) c.failures = failures_from_json(*it);

  // z0 may be given at the top level, in the policy, or both (then equal).
  const bool top = j.contains("z0");
  const bool inner = j.contains("policy") && j["policy"].contains("z0");
  read(j, "z0", c.z0, "config");
  if (top && inner && c.z0 != c.policy.z0) throw ConfigError("z0 and policy.z0 disagree");
  if (top) c.policy.z0 = c.z0;
  if (!top) c.z0 = c.policy.z0;

  read_enum(j, "placement", c.placement, parse_placement, "config");
  read(j, "horizon", c.horizon, "config");
  read(j, "runs", c.runs, "config");
  read(j, "seed", c.seed, "config");
  if (auto it = j.find("outputs"); it != j.end()) {
    reject_unknown(*it, {"trace_csv", "events_jsonl", "estimates"}, "outputs");
    read(*it, "trace_csv", c.outputs.trace_csv, "outputs");
    read(*it, "events_jsonl", c.outputs.events_jsonl, "outputs");
    read(*it, "estimates", c.outputs.estimates, "outputs");
  }
  read(j, "warmup_cap", c.warmup_cap, "config");
  read(j, "fixed_graph", c.fixed_graph, "config");
  read(j, "local_knowledge", c.local_knowledge, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace rwres
