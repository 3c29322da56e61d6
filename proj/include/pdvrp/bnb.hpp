#pragma once

// Best-first branch and bound over the simplex solver, plus a brute-force
// route enumeration used as an independent oracle on tiny instances.

#include <functional>
#include <vector>

#include "pdvrp/evaluate.hpp"
#include "pdvrp/instance.hpp"
#include "pdvrp/linear_model.hpp"
#include "pdvrp/simplex.hpp"

namespace pdvrp {

enum class MilpStatus { Optimal, Infeasible, NodeLimit };

const char* to_string(MilpStatus status);

struct NodeInfo {
  long id = 0;
  long parent = -1;  // -1 at the root
  int depth = 0;
  LpStatus lp_status = LpStatus::Optimal;
  double lp_value = 0.0;
  double parent_lp_value = 0.0;
};

struct MilpOptions {
  long node_limit = 1000000;
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;
  SimplexOptions lp;
  // Called after every node LP solve.
  std::function<void(const NodeInfo&)> on_node;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  long nodes = 0;
  double gap = 0.0;
  long lp_iterations = 0;
};

// Branches on the most fractional integer column (lowest index on ties),
// down branch first; open nodes are explored by smallest parent bound, first
// created first on ties. Integer columns of the returned point are exact.
MilpSolution solve_milp(const LinearModel& model, const MilpOptions& options = {});

struct OracleResult {
  double objective = 0.0;
  std::vector<Route> routes;
};

// Tries every assignment of pickup/delivery pairs to vehicles and every
// precedence-respecting order per vehicle, checking loads by simulation.
// Pairs are only assigned to vehicles whose local request set holds them.
// Guarded to N <= 3 and |P| <= 3; throws std::invalid_argument otherwise.
OracleResult enumerate_routes_oracle(const Instance& instance);

}  // namespace pdvrp
