#include "pdvrp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdvrp {

namespace {

std::string at(int vehicle) { return "vehicle " + std::to_string(vehicle) + ": "; }

}  // namespace

double route_cost(const Instance& instance, const Route& route) {
  double total = 0.0;
  int prev = instance.start_vertex();
  for (int r : route.requests) {
    total += instance.cost(route.vehicle, prev, r + 1);
    prev = r + 1;
  }
  return total + instance.cost(route.vehicle, prev, instance.end_vertex());
}

EvaluationReport evaluate_routes(const Instance& instance, const std::vector<Route>& routes,
                                 const EvaluationOptions& options) {
  EvaluationReport rep;
  const int n = instance.num_vehicles();
  const int nr = instance.num_requests();
  const int np = instance.num_pickups();
  rep.coverage.assign(nr, 0);
  rep.vehicle_cost.assign(n, 0.0);
  std::vector<int> seen_vehicle(n, 0);

  for (const Route& route : routes) {
    const int i = route.vehicle;
    if (i < 0 || i >= n) {
      rep.violations.push_back("route for unknown vehicle " + std::to_string(i));
      continue;
    }
    if (seen_vehicle[i]++) rep.violations.push_back(at(i) + "more than one route");
    const Vehicle& veh = instance.vehicles()[i];
    std::vector<int> position(nr, -1);
    bool ids_ok = true;
    for (std::size_t k = 0; k < route.requests.size(); ++k) {
      const int r = route.requests[k];
      if (r < 0 || r >= nr) {
        rep.violations.push_back(at(i) + "unknown request " + std::to_string(r));
        ids_ok = false;
        continue;
      }
      if (position[r] >= 0) rep.violations.push_back(at(i) + "visits request " + std::to_string(r) + " twice");
      position[r] = static_cast<int>(k);
    }
    if (!ids_ok) continue;

    std::vector<int> allowed;
    if (options.local_sets) allowed = local_request_set(instance, i);
    for (int r = 0; r < nr; ++r) {
      if (position[r] < 0) continue;
      ++rep.coverage[r];
      if (options.local_sets && !std::binary_search(allowed.begin(), allowed.end(), r))
        rep.violations.push_back(at(i) + "request " + std::to_string(r) + " outside its local set");
    }
    for (int p = 0; p < np; ++p) {
      const int d = p + np;
      if ((position[p] >= 0) != (position[d] >= 0)) {
        rep.violations.push_back(at(i) + "pickup " + std::to_string(p) + " and its delivery not served together");
      } else if (position[p] > position[d]) {
        rep.violations.push_back(at(i) + "delivery of pair " + std::to_string(p) + " before its pickup");
      }
    }
    // Simulated load after each stop must lie in [max(0,q), min(C, C+q)].
    double load = veh.initial_load;
    if (load < -1e-9 || load > veh.capacity + 1e-9)
      rep.violations.push_back(at(i) + "initial load out of range");
    for (int r : route.requests) {
      const double q = instance.requests()[r].demand;
      load += q;
      const double lo = std::max(0.0, q);
      const double hi = std::min(veh.capacity, veh.capacity + q);
      if (load < lo - 1e-9 || load > hi + 1e-9)
        rep.violations.push_back(at(i) + "load " + std::to_string(load) + " out of range at request " +
                                 std::to_string(r));
    }
    rep.vehicle_cost[i] = route_cost(instance, route);
  }
  for (int i = 0; i < n; ++i) {
    if (!seen_vehicle[i]) rep.violations.push_back(at(i) + "no route");
  }
  for (int r = 0; r < nr; ++r) {
    if (rep.coverage[r] < options.coverage_rhs - 1e-9)
      rep.violations.push_back("request " + std::to_string(r) + " covered " +
                               std::to_string(rep.coverage[r]) + " times");
  }
  for (double c : rep.vehicle_cost) rep.cost += c;
  rep.feasible = rep.violations.empty();
  return rep;
}

std::vector<std::string> check_local_point(const Instance& instance, const TaskGraph& graph,
                                           int vehicle, const std::vector<double>& x,
                                           const std::vector<double>& b,
                                           const std::vector<double>& q, double tol) {
  std::vector<std::string> out;
  const int nv = graph.num_vertices();
  const int s = instance.start_vertex();
  const int e = instance.end_vertex();
  const double cap = instance.vehicles()[vehicle].capacity;
  std::vector<double> out_sum(nv, 0.0), in_sum(nv, 0.0);
  for (int a = 0; a < graph.num_arcs(); ++a) {
    const Arc& arc = graph.arcs[a];
    if (std::abs(x[a]) > tol && std::abs(x[a] - 1.0) > tol)
      out.push_back("x not binary on arc " + std::to_string(arc.from) + "->" + std::to_string(arc.to));
    if (arc.from == e || arc.to == s || arc.from == arc.to) out.push_back("inadmissible arc");
    out_sum[graph.local_index(arc.from)] += x[a];
    in_sum[graph.local_index(arc.to)] += x[a];
  }
  if (std::abs(out_sum[graph.local_index(s)] - 1.0) > tol) out.push_back("start row");
  if (std::abs(in_sum[graph.local_index(e)] - 1.0) > tol) out.push_back("end row");
  for (int p = 0; p < nv; ++p) {
    const int v = graph.vertices[p];
    if (v == s || v == e) continue;
    if (std::abs(in_sum[p] - out_sum[p]) > tol) out.push_back("flow at vertex " + std::to_string(v));
  }
  const int np = instance.num_pickups();
  for (int r : graph.requests) {
    if (r >= np) continue;
    const int pu = graph.local_index(r + 1);
    const int de = graph.local_index(r + np + 1);
    if (de < 0) {
      out.push_back("delivery of pickup " + std::to_string(r) + " missing from graph");
      continue;
    }
    if (std::abs(out_sum[pu] - out_sum[de]) > tol) out.push_back("pairing of pickup " + std::to_string(r));
    if (b[pu] > b[de] + tol) out.push_back("precedence of pickup " + std::to_string(r));
  }
  for (int a = 0; a < graph.num_arcs(); ++a) {
    if (x[a] < 0.5) continue;
    const Arc& arc = graph.arcs[a];
    const int j = graph.local_index(arc.from);
    const int k = graph.local_index(arc.to);
    const double need = b[j] + instance.vertex_service(arc.from) + instance.travel_time(vehicle, arc.from, arc.to);
    if (b[k] < need - tol)
      out.push_back("time propagation on arc " + std::to_string(arc.from) + "->" + std::to_string(arc.to));
    if (std::abs(q[k] - q[j] - instance.vertex_demand(arc.to)) > tol)
      out.push_back("load propagation on arc " + std::to_string(arc.from) + "->" + std::to_string(arc.to));
  }
  for (int p = 0; p < nv; ++p) {
    const double d = instance.vertex_demand(graph.vertices[p]);
    if (q[p] < std::max(0.0, d) - tol || q[p] > std::min(cap, cap + d) + tol)
      out.push_back("load bounds at vertex " + std::to_string(graph.vertices[p]));
    if (b[p] < -tol) out.push_back("negative begin time at vertex " + std::to_string(graph.vertices[p]));
  }
  if (std::abs(q[graph.local_index(s)] - instance.vehicles()[vehicle].initial_load) > tol)
    out.push_back("initial load");
  return out;
}

}  // namespace pdvrp
