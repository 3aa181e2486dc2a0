#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "rwres/errors.hpp"
#include "rwres/harness.hpp"

namespace rwres {

std::uint64_t run_seed(std::uint64_t base, int run) {
  return derive_seed(base, static_cast<std::uint64_t>(run));
}

RunResult run_single(const ExperimentConfig& config, int run) {
  RunResult out;
  out.run = run;
  out.seed = run_seed(config.seed, run);

  GraphSpec spec = config.graph;
  if (!config.fixed_graph) spec.seed = derive_seed(out.seed, 0);
  auto graph = std::make_shared<const Graph>(generate(spec));

  SimOptions options;
  options.z0 = config.z0;
  options.placement = config.placement;
  options.seed = derive_seed(out.seed, 1);
  options.warmup_cap = config.warmup_cap;
  options.local_knowledge = config.local_knowledge;
  options.log_estimates = config.outputs.estimates;

  Simulation sim(std::move(graph), config.policy, config.failures, options);
  sim.warmup();
  out.trace = sim.run(config.horizon);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int parallel) {
  config.validate();
  if (parallel < 1) throw ConfigError("parallel must be at least 1");
  ExperimentResult result;
  result.config = config;
  result.runs.resize(static_cast<std::size_t>(config.runs));

  const int workers = std::min(parallel, config.runs);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int run = next++; run < config.runs; run = next++) {
      try {
        result.runs[static_cast<std::size_t>(run)] = run_single(config, run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.runs;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregate = aggregate_runs(result.runs);
  return result;
}

AggregateTrace aggregate_runs(std::span<const RunResult> runs) {
  AggregateTrace agg;
  if (runs.empty()) return agg;
  std::vector<const RunResult*> ordered;
  for (const RunResult& r : runs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const RunResult* a, const RunResult* b) { return a->run < b->run; });

  const std::size_t len = ordered.front()->trace.z_series.size();
  for (const RunResult* r : ordered) {
    if (r->trace.z_series.size() != len) throw RuntimeError("aggregate: traces differ in length");
  }
  const double count = static_cast<double>(ordered.size());
  agg.mean_z.resize(len);
  agg.std_z.resize(len);
  agg.min_z.resize(len);
  agg.max_z.resize(len);
  agg.frac_extinct.resize(len);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    int lo = ordered.front()->trace.z_series[t];
    int hi = lo;
    int extinct = 0;
    for (const RunResult* r : ordered) {
      const int z = r->trace.z_series[t];
      sum += z;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
      extinct += z == 0;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (const RunResult* r : ordered) {
      const double d = r->trace.z_series[t] - mean;
      sq += d * d;
    }
    agg.mean_z[t] = mean;
    agg.std_z[t] = std::sqrt(sq / count);
    agg.min_z[t] = lo;
    agg.max_z[t] = hi;
    agg.frac_extinct[t] = extinct / count;
  }
  return agg;
}

}  // namespace rwres
