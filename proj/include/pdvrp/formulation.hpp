#pragma once

// Linearized pickup-and-delivery model: per-vehicle route blocks (arc
// binaries x, begin times B, loads Q), the covering rows that couple the
// vehicles, and the centralized MILP assembled from both.

#include <vector>

#include "pdvrp/instance.hpp"
#include "pdvrp/linear_model.hpp"

namespace pdvrp {

// Big-M constants for one vehicle over one task graph.
struct BigMData {
  double b_bar = 0.0;           // upper bound on every begin time
  std::vector<double> q_lo;     // per local vertex: max(0, q)
  std::vector<double> q_hi;     // per local vertex: min(C, C + q)
  std::vector<double> m_time;   // per arc: b_bar + d^j + t^{jk}
  std::vector<double> w_upper;  // per arc: max(0, q_hi^j + q^k)
  std::vector<double> w_lower;  // per arc: max(0, q_hi^k - q^k - q_lo^j)
};

// Sum of the vehicle's travel times over the arcs of `graph` plus the
// service times of its requests.
double time_upper_bound(const Instance& instance, const TaskGraph& graph, int vehicle);
// Same over the full task graph.
double time_upper_bound(const Instance& instance, int vehicle);

BigMData compute_big_m(const Instance& instance, const TaskGraph& graph, int vehicle);

// Column and row ranges of one vehicle's block inside a model.
struct LocalBlock {
  int vehicle = 0;
  TaskGraph graph;
  BigMData big_m;
  int x_begin = 0;  // one column per arc, in graph arc order
  int b_begin = 0;  // one column per local vertex
  int q_begin = 0;  // one column per local vertex
  int row_begin = 0;
  int row_end = 0;

  int x(int arc) const { return x_begin + arc; }
  int b(int local_vertex) const { return b_begin + local_vertex; }
  int q(int local_vertex) const { return q_begin + local_vertex; }
  int num_columns() const { return 2 * graph.num_vertices() + graph.num_arcs(); }
  // Arc indices leaving the vertex of request j (empty when j is not local).
  const std::vector<int>& out_arcs_of_request(int request) const;
};

// Rows per kind emitted by add_local_constraints.
struct LocalRowCounts {
  int start = 0, end = 0, flow = 0, pairing = 0, precedence = 0, time = 0, load_lower = 0,
      load_upper = 0;
  int total() const {
    return start + end + flow + pairing + precedence + time + load_lower + load_upper;
  }
};

// Appends vehicle i's columns and local rows to `model`. Arc costs go into
// the objective; x is binary. Row order: start, end, flow (one per request),
// pairing (one per pickup), precedence (one per pickup), time (one per arc),
// lower load (one per arc), upper load (one per arc). Q^s is fixed through
// its bounds to the initial load.
LocalBlock add_local_constraints(LinearModel& model, const Instance& instance,
                                 const TaskGraph& graph, int vehicle);

LocalRowCounts local_row_counts(const LocalBlock& block, const LinearModel& model);

// One row per request: sum over blocks of the arcs leaving j >= rhs.
// Requests not present in any block still get a row (with no terms).
std::vector<int> add_coupling_rows(LinearModel& model, const std::vector<LocalBlock>& blocks,
                                   int num_requests, double rhs);

struct CentralizedModel {
  LinearModel model;
  std::vector<LocalBlock> blocks;
  std::vector<int> coupling_rows;
};

// Full MILP with every vehicle on its local graph (the full graph when the
// fleet is homogeneous). Throws std::invalid_argument when some request is
// not coverable by any vehicle.
CentralizedModel build_centralized_milp(const Instance& instance);

// Sequence of requests visited by the block's route at point `x` (arc values
// above 0.5 are taken as used). Throws std::runtime_error when the used arcs
// do not form a single path from s to sigma.
std::vector<int> extract_route(const LocalBlock& block, const std::vector<double>& x);

// Builds a model point for a block from a route: arcs along the route set
// to 1, begin times propagated by earliest arrival, loads propagated from the
// initial load. Vertices off the route get B = 0 and Q = its lower bound.
void route_to_point(const Instance& instance, const LocalBlock& block,
                    const std::vector<int>& route, std::vector<double>& x);

}  // namespace pdvrp
