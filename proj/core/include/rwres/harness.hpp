#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwres/engine.hpp"
#include "rwres/failures.hpp"
#include "rwres/graph.hpp"
#include "rwres/policies.hpp"

namespace rwres {

struct OutputOptions {
  bool trace_csv = false;    // run_<k>.csv per run
  bool events_jsonl = true;
  bool estimates = false;    // estimates.csv; logs every decision
  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct ExperimentConfig {
  GraphSpec graph;
  PolicyConfig policy;
  FailurePlan failures;
  int z0 = 10;
  Placement placement = Placement::single_node;
  TimeStep horizon = 10'000;
  int runs = 50;
  std::uint64_t seed = 1;
  OutputOptions outputs;
  TimeStep warmup_cap = 1'000'000;
  /// Reuse graph.seed for every run instead of a per-run graph.
  bool fixed_graph = false;
  /// See SimOptions::local_knowledge.
  bool local_knowledge = true;

  /// Throws ConfigError.
  void validate() const;
};

/// Per-step statistics across runs. std_z is the population standard
/// deviation.
struct AggregateTrace {
  std::vector<double> mean_z;
  std::vector<double> std_z;
  std::vector<int> min_z;
  std::vector<int> max_z;
  std::vector<double> frac_extinct;

  std::size_t size() const { return mean_z.size(); }
};

struct RunResult {
  int run = 0;
  std::uint64_t seed = 0;
  RunTrace trace;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;  // ordered by run index
  AggregateTrace aggregate;
};

/// Seed of run `run`; the graph and the simulation draw from separate
/// streams derived from it.
std::uint64_t run_seed(std::uint64_t base, int run);

/// Executes one run of the experiment.
RunResult run_single(const ExperimentConfig& config, int run);

/// Executes all runs on `parallel` worker threads. Results do not depend on
/// the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, int parallel = 1);

/// Aggregates runs in ascending run order. All traces must have equal length.
AggregateTrace aggregate_runs(std::span<const RunResult> runs);

// Configuration I/O (JSON, snake_case keys). Unknown keys are rejected.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Figure presets.
struct PresetVariant {
  std::string label;
  ExperimentConfig config;
};

const std::vector<std::string>& preset_names();
/// Throws ConfigError for an unknown name.
std::vector<PresetVariant> preset(std::string_view name);

// Output artifacts.
void write_aggregate_csv(const AggregateTrace& aggregate, std::ostream& out);
void write_run_csv(const RunTrace& trace, std::ostream& out);
void write_events_jsonl(std::span<const RunResult> runs, std::ostream& out);
void write_estimates_csv(std::span<const RunResult> runs, std::ostream& out);
/// Fitted rates, designed thresholds and bound values for the experiment.
std::string theory_summary_json(const ExperimentResult& result);

/// Writes aggregate.csv, config.json, theory.json and the optional
/// per-run, event and estimate files into `dir` (created if needed).
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace rwres
