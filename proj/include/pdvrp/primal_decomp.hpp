#pragma once

// Per-agent state and steps of the distributed allocation scheme: local LP
// with penalized covering rows, multiplier exchange, allocation update,
// running average, thresholding and the final local routing problem.

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "pdvrp/formulation.hpp"
#include "pdvrp/instance.hpp"
#include "pdvrp/linear_model.hpp"
#include "pdvrp/simplex.hpp"

namespace pdvrp {

class VehicleRouteTable;

enum class FinalSolver { SubsetDp, BranchAndBound };

// Local set used inside the subproblem LP. Relaxation: the big-M block with
// integrality dropped. Hull: the exact convex hull of the vehicle's routes in
// coverage space, one weight per servable pair set priced by the route DP.
enum class SubproblemKind { Relaxation, Hull };

struct AgentConfig {
  double delta = 0.9;
  int iterations = 250;  // T_f
  double step_k = 0.005;
  int step_switch = 125;  // T_s
  bool averaging = true;
  // Penalty weight M; <= 0 selects default_penalty(instance).
  double penalty = 0.0;
  // Restrict each agent to its local request set.
  bool local_sets = false;
  FinalSolver final_solver = FinalSolver::SubsetDp;
  SubproblemKind subproblem = SubproblemKind::Hull;
};

// Throws std::invalid_argument when the configuration is unusable.
void validate(const AgentConfig& config);

// K/(t+1) before the switch iteration, K/T_s afterwards.
double step_size(int t, const AgentConfig& config);

// 50 times the largest per-vehicle sum of arc costs.
double default_penalty(const Instance& instance, bool local_sets);

// y - alpha * sum over neighbors of (mu_self - mu_neighbor).
std::vector<double> update_allocation(const std::vector<double>& y, const std::vector<double>& mu_self,
                                      const std::vector<const std::vector<double>*>& mu_neighbors,
                                      double alpha);

// Weighted mean of the iterates added so far.
class RunningAverage {
 public:
  void add(double weight, const std::vector<double>& y);
  bool empty() const { return total_weight_ == 0.0; }
  std::vector<double> mean() const;

 private:
  std::vector<double> weighted_sum_;
  double total_weight_ = 0.0;
};

// min(y, 1) componentwise; with a mask, min(y, 0) where mask is false.
std::vector<double> threshold_allocation(const std::vector<double>& y,
                                         const std::vector<char>* local_mask = nullptr);

struct SubproblemResult {
  double objective = 0.0;
  double violation = 0.0;  // value of v
  std::vector<double> mu;
  int lp_iterations = 0;
};

struct FinalRoute {
  int vehicle = 0;
  std::vector<int> requests;   // visiting order
  std::vector<double> x;       // arc values, graph arc order
  std::vector<double> b;       // begin times, graph vertex order
  std::vector<double> q;       // loads, graph vertex order
  double cost = 0.0;
};

class Agent {
 public:
  Agent(const Instance& instance, int id, int num_agents, const AgentConfig& config, double penalty);
  ~Agent();
  Agent(Agent&&) noexcept;
  Agent& operator=(Agent&&) noexcept;

  int id() const { return id_; }
  const std::vector<double>& allocation() const { return y_; }
  const std::vector<double>& multipliers() const { return mu_; }
  const std::vector<char>& local_mask() const { return mask_; }
  const LocalBlock& block() const { return block_; }
  const LinearModel& subproblem() const { return sub_; }
  int iteration() const { return t_; }

  // LP for the current allocation; stores and returns its multipliers.
  const SubproblemResult& solve_subproblem();
  const SubproblemResult& last_subproblem() const { return last_; }

  // Applies the update for round t with the neighbors' round-t multipliers,
  // then advances to round t + 1 and feeds the running average.
  void apply_update(const std::vector<const std::vector<double>*>& neighbor_mu);

  // Allocation handed to thresholding after the last round.
  std::vector<double> final_allocation() const;

  // Thresholds `y` and solves the local routing problem on it.
  FinalRoute finish(const std::vector<double>& y);

  // Overwrites the allocation; only for tests and probes.
  void set_allocation(std::vector<double> y) { y_ = std::move(y); }

 private:
  FinalRoute solve_final(const std::vector<double>& y_end);
  const VehicleRouteTable& table();

  const Instance* instance_;
  int id_;
  AgentConfig config_;
  double penalty_;
  std::vector<char> mask_;
  std::vector<double> y_;
  std::vector<double> mu_;
  int t_ = 0;
  RunningAverage average_;

  LinearModel sub_;
  LinearModel block_model_;  // integer block, for final solves and points
  LocalBlock block_;
  int v_col_ = 0;
  std::vector<int> cover_rows_;
  std::unique_ptr<SimplexSolver> lp_;
  SubproblemResult last_;

  // Final problems only depend on which requests have positive allocation.
  std::map<std::uint64_t, FinalRoute> final_cache_;
  std::unique_ptr<VehicleRouteTable> table_;
};

// Model for the final local problem: the agent's block with integrality and
// one covering row per request with rhs y_end[j].
LinearModel build_final_milp(const Instance& instance, const LocalBlock& block,
                             const std::vector<double>& y_end, std::vector<int>* cover_rows = nullptr);

}  // namespace pdvrp
