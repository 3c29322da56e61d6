#pragma once

// Constraint evaluator working on routes and on raw (x, B, Q) values in the
// original implication form. It shares no code with the model builder so it
// can be used to check it.

#include <string>
#include <vector>

#include "pdvrp/instance.hpp"

namespace pdvrp {

struct Route {
  int vehicle = 0;
  std::vector<int> requests;  // visiting order, s and sigma implicit
};

struct EvaluationOptions {
  double coverage_rhs = 1.0;
  // Reject visits to requests outside the vehicle's local request set.
  bool local_sets = true;
};

struct EvaluationReport {
  bool feasible = false;
  std::vector<std::string> violations;
  std::vector<int> coverage;  // number of vehicles visiting each request
  std::vector<double> vehicle_cost;
  double cost = 0.0;
};

// Checks one route per vehicle against covering, start/end, flow, pairing,
// precedence, time propagation and load limits.
EvaluationReport evaluate_routes(const Instance& instance, const std::vector<Route>& routes,
                                 const EvaluationOptions& options = {});

double route_cost(const Instance& instance, const Route& route);

// Checks values of one vehicle's variables on `graph` in implication form:
// x indexed like graph.arcs, B and Q indexed like graph.vertices. Returns
// one message per violated condition.
std::vector<std::string> check_local_point(const Instance& instance, const TaskGraph& graph,
                                           int vehicle, const std::vector<double>& x,
                                           const std::vector<double>& b,
                                           const std::vector<double>& q, double tol = 1e-7);

}  // namespace pdvrp
