#pragma once

// Experiment driver: one trial runs the distributed pipeline on a generated
// instance, plays it back, and compares with the exact centralized optimum.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdvrp/instance.hpp"
#include "pdvrp/network_sim.hpp"

namespace pdvrp {

enum class Baseline { SubsetDp, BranchAndBound };

struct TrialConfig {
  std::uint64_t seed = 1;
  int vehicles = 3;
  int pickups = 3;
  bool heterogeneous = false;
  Rect area{0.0, 0.0, 10.0, 10.0};
  GraphKind graph = GraphKind::Complete;
  std::uint64_t graph_seed = 0;  // 0: reuse `seed`
  RunOptions run;
  Baseline baseline = Baseline::SubsetDp;
  long bnb_node_limit = 200000;
  int workers = 1;
};

struct TrialResult {
  std::uint64_t seed = 0;
  int vehicles = 0;
  int pickups = 0;
  double delta = 0.0;
  bool feasible = false;
  bool usable = true;  // false when the baseline did not finish
  std::string failure;
  double planned_cost = 0.0;
  double actuated_cost = 0.0;
  double optimal_cost = 0.0;
  double planned_error = 0.0;
  double actuated_error = 0.0;
  int t_delta = -1;  // -1 when not probed
  bool coverage_integral = false;
  bool all_served = false;
  int active_vehicles = 0;
  double max_conservation_error = 0.0;
  double distributed_seconds = 0.0;
  double baseline_seconds = 0.0;
};

Instance make_trial_instance(const TrialConfig& config);

// Never throws for per-trial failures; they are recorded in `failure`.
TrialResult run_trial(const TrialConfig& config);

// Same with a prebuilt instance (config.seed still seeds the graph).
TrialResult run_trial(const TrialConfig& config, const Instance& instance);

struct CellSummary {
  int vehicles = 0;
  int pickups = 0;
  double delta = 0.0;
  int trials = 0;
  int usable = 0;
  int feasible = 0;
  double mean_planned_error = 0.0;
  double median_planned_error = 0.0;
  double p25_planned_error = 0.0;
  double p75_planned_error = 0.0;
  double mean_actuated_error = 0.0;
  double mean_optimal_cost = 0.0;
  double mean_planned_cost = 0.0;
  double t_delta_zero_fraction = 0.0;  // among probed trials
};

struct Sweep {
  std::vector<int> vehicles{3, 5, 10};
  std::vector<int> pickups{5};
  std::vector<double> deltas{0.9};
  int trials = 20;
  std::uint64_t first_seed = 1;
  TrialConfig base;
};

struct MonteCarloResult {
  std::vector<TrialResult> trials;
  std::vector<CellSummary> cells;
};

// Trials run in sweep order; seeds are first_seed, first_seed + 1, ... inside
// every cell. Trials are spread over `base.workers` threads.
MonteCarloResult run_montecarlo(const Sweep& sweep);

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials);

// Linear-interpolated percentile (q in [0, 1]) of a non-empty sample.
double percentile(std::vector<double> values, double q);

void write_csv(std::ostream& out, const std::vector<TrialResult>& trials);
void write_summary_json(std::ostream& out, const std::vector<CellSummary>& cells);

}  // namespace pdvrp
