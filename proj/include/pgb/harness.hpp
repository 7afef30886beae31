#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgb/costmodel.hpp"
#include "pgb/json_io.hpp"
#include "pgb/netgraph.hpp"
#include "pgb/planner.hpp"
#include "pgb/simcore.hpp"
#include "pgb/workload.hpp"

namespace pgb {

// Full coverage is possible under capacities but required by the solver.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct TopologySpec {
  enum class Kind { fat_tree, random };
  Kind kind = Kind::fat_tree;
  int pods = 4;           // fat_tree
  int num_servers = 20;   // random
  double connect_prob = 0.2;
};

struct ExperimentConfig {
  TopologySpec topology;
  int num_types = 20;
  int num_chains = 50;
  int primary_capacity = 8;
  int backup_capacity = 3;
  int assoc_limit = 5;
  double chain_rate = 1.0;
  int chain_len_min = 1;
  int chain_len_max = 20;
  CostParams cost;
  bool sim_enabled = false;
  SimParams sim;
  std::vector<std::string> strategies{"piggybackup", "random", "shortest_path"};
  std::vector<std::uint64_t> seeds{0,  1,  2,  3,  4,  5,  6,  7,  8,  9,
                                   10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  ExactGuard exact_guard;
  std::string sweep_axis;          // optional; empty = single scenario
  std::vector<double> sweep_values;

  void validate() const;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& cfg);

// Topology, placement, and routed chains for one master seed. Each stage
// draws from its own label-derived substream, so e.g. adding a strategy
// never perturbs the workload.
struct Scenario {
  NetworkGraph graph;
  DistanceTable dists;
  std::vector<PrimaryInstance> instances;
  std::vector<ServiceChain> chains;
};

Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed);

DeploymentPlan run_strategy(const Scenario& sc, const ExperimentConfig& cfg,
                            const std::string& strategy, std::uint64_t seed);

struct ResultRow {
  std::string scenario;
  std::string strategy;
  std::uint64_t seed = 0;
  double piggyback_ratio = 0.0;
  std::int64_t piggyback_hops = 0;
  std::int64_t standalone_hops = 0;
  std::int64_t total_hops = 0;
  std::int64_t total_bytes = 0;
  std::int64_t total_byte_hops = 0;
  double expected_cost = 0.0;
  double sim_success_prob = 0.0;       // NaN when simulation is off
  double sim_mean_piggyback_hops = 0.0;
  double sim_total_byte_hops = 0.0;
  double runtime_ms = 0.0;
};

std::vector<ResultRow> run_scenario(const ExperimentConfig& cfg,
                                    std::uint64_t seed,
                                    const std::string& scenario_id = "default");

struct AggregateRow {
  std::string scenario;
  std::string strategy;
  int n = 0;
  // Means and sample standard deviations, keyed like the CSV columns.
  std::vector<double> mean;
  std::vector<double> sd;
};

struct SweepResult {
  std::vector<ResultRow> rows;          // sorted by (scenario, strategy, seed)
  std::vector<AggregateRow> aggregates; // same ordering, seeds collapsed
};

// Cross product of axis values and seeds; empty axis runs the base config as
// the single scenario "default".
SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis,
                      const std::vector<double>& values);

ExperimentConfig apply_axis(const ExperimentConfig& base,
                            const std::string& axis, double value);

const std::vector<std::string>& result_metric_names();
std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);
std::string aggregates_to_csv(const std::vector<AggregateRow>& aggs);
json rows_to_json(const std::vector<ResultRow>& rows);
std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);

// Mean reduction of every metric in `ours` relative to `baseline`, grouped
// by scenario id: 100 * (baseline_mean - ours_mean) / baseline_mean.
struct CompareRow {
  std::string scenario;
  std::string metric;
  double ours_mean = 0.0;
  double baseline_mean = 0.0;
  double reduction_pct = 0.0;
};

std::vector<CompareRow> compare_rows(const std::vector<ResultRow>& ours,
                                     const std::vector<ResultRow>& baseline);
std::string compare_to_csv(const std::vector<CompareRow>& rows);
json compare_to_json(const std::vector<CompareRow>& rows);

}  // namespace pgb
