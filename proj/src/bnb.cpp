#include "pdvrp/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <stdexcept>

namespace pdvrp {

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::Optimal:
      return "optimal";
    case MilpStatus::Infeasible:
      return "infeasible";
    case MilpStatus::NodeLimit:
      return "node_limit";
  }
  return "?";
}

namespace {

struct BoundChange {
  int column;
  double lower;
  double upper;
};

struct Node {
  double bound;
  long seq;
  long id;
  long parent;
  int depth;
  std::vector<BoundChange> changes;  // relative to the root, last one wins
};

struct NodeOrder {
  bool operator()(const Node* a, const Node* b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->seq > b->seq;
  }
};

}  // namespace

MilpSolution solve_milp(const LinearModel& model, const MilpOptions& options) {
  const LinearModel relaxed = lp_relaxation(model);
  SimplexSolver lp(relaxed, options.lp);
  const int n = model.num_variables();
  std::vector<int> integer_cols;
  for (int j = 0; j < n; ++j) {
    if (model.variable(j).integer) integer_cols.push_back(j);
  }
  std::vector<double> root_lo(n), root_hi(n);
  for (int j = 0; j < n; ++j) {
    root_lo[j] = relaxed.variable(j).lower;
    root_hi[j] = relaxed.variable(j).upper;
  }

  MilpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  bool have_incumbent = false;

  std::vector<int> touched;
  std::vector<char> is_touched(n, 0);
  auto apply = [&](const std::vector<BoundChange>& changes) {
    for (int j : touched) {
      lp.set_column_bounds(j, root_lo[j], root_hi[j]);
      is_touched[j] = 0;
    }
    touched.clear();
    for (const BoundChange& c : changes) {
      lp.set_column_bounds(c.column, c.lower, c.upper);
      if (!is_touched[c.column]) {
        is_touched[c.column] = 1;
        touched.push_back(c.column);
      }
    }
  };

  std::priority_queue<Node*, std::vector<Node*>, NodeOrder> open;
  std::vector<std::unique_ptr<Node>> storage;
  long seq = 0;
  storage.push_back(std::make_unique<Node>(Node{-std::numeric_limits<double>::infinity(), seq++, 0, -1, 0, {}}));
  open.push(storage.back().get());
  long next_id = 1;
  long processed = 0;
  double open_bound = std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    Node* node = open.top();
    if (have_incumbent && node->bound >= best.objective - 1e-9) {
      open.pop();
      continue;
    }
    if (processed >= options.node_limit) {
      open_bound = node->bound;
      break;
    }
    open.pop();
    ++processed;
    apply(node->changes);
    const LpSolution sol = lp.solve();
    best.lp_iterations += sol.iterations;
    if (sol.status == LpStatus::IterationLimit)
      throw std::runtime_error("branch and bound: LP iteration limit reached");
    if (sol.status == LpStatus::Unbounded)
      throw std::runtime_error("branch and bound: LP relaxation unbounded");
    if (options.on_node) {
      options.on_node({node->id, node->parent, node->depth, sol.status, sol.objective,
                       node->bound});
    }
    if (sol.status == LpStatus::Infeasible) continue;
    if (have_incumbent && sol.objective >= best.objective - 1e-9) continue;

    int branch_col = -1;
    double branch_frac = 0.0;
    for (int j : integer_cols) {
      const double v = sol.primal[j];
      const double f = v - std::floor(v);
      const double dist = std::min(f, 1.0 - f);
      if (dist > options.integrality_tol && dist > branch_frac + 1e-12) {
        branch_frac = dist;
        branch_col = j;
      }
    }

    if (branch_col < 0) {
      std::vector<double> x = sol.primal;
      for (int j : integer_cols) x[j] = std::round(x[j]);
      if (model.max_violation(x) > options.feasibility_tol) {
        // Rounding moved the point; recompute the continuous part with the
        // integers fixed.
        std::vector<BoundChange> fixed = node->changes;
        for (int j : integer_cols) fixed.push_back({j, x[j], x[j]});
        apply(fixed);
        const LpSolution fix = lp.solve();
        best.lp_iterations += fix.iterations;
        if (fix.status != LpStatus::Optimal) continue;
        x = fix.primal;
        for (int j : integer_cols) x[j] = std::round(x[j]);
        if (model.max_violation(x) > options.feasibility_tol) continue;
      }
      const double obj = model.objective(x);
      if (!have_incumbent || obj < best.objective) {
        best.x = std::move(x);
        best.objective = obj;
        have_incumbent = true;
      }
      continue;
    }

    const double v = sol.primal[branch_col];
    const double lo = node->bound > sol.objective ? node->bound : sol.objective;
    Node down{lo, seq++, next_id++, node->id, node->depth + 1, node->changes};
    down.changes.push_back({branch_col, root_lo[branch_col], std::floor(v)});
    Node up{lo, seq++, next_id++, node->id, node->depth + 1, node->changes};
    up.changes.push_back({branch_col, std::ceil(v), root_hi[branch_col]});
    // Tighten against earlier changes to the same column.
    for (Node* child : {&down, &up}) {
      double l = root_lo[branch_col], h = root_hi[branch_col];
      for (const BoundChange& c : child->changes) {
        if (c.column != branch_col) continue;
        l = std::max(l, c.lower);
        h = std::min(h, c.upper);
      }
      child->changes.back() = {branch_col, l, h};
    }
    storage.push_back(std::make_unique<Node>(std::move(down)));
    open.push(storage.back().get());
    storage.push_back(std::make_unique<Node>(std::move(up)));
    open.push(storage.back().get());
  }

  best.nodes = processed;
  if (!open.empty() && processed >= options.node_limit) {
    best.status = MilpStatus::NodeLimit;
    best.gap = have_incumbent ? best.objective - open_bound : std::numeric_limits<double>::infinity();
    if (!have_incumbent) best.objective = std::numeric_limits<double>::infinity();
    return best;
  }
  best.status = have_incumbent ? MilpStatus::Optimal : MilpStatus::Infeasible;
  best.gap = 0.0;
  if (!have_incumbent) best.objective = std::numeric_limits<double>::infinity();
  return best;
}

namespace {

struct OracleSearch {
  const Instance& inst;
  int vehicle;
  std::vector<int> order;
  std::vector<int> best_order;
  double best = std::numeric_limits<double>::infinity();
};

// All orders of `reqs` with every pickup before its delivery and the load
// inside [max(0,q), min(C, C+q)] after each stop.
void permute(OracleSearch& s, std::vector<int>& remaining, double load, double cost, int last) {
  const int np = s.inst.num_pickups();
  const Vehicle& veh = s.inst.vehicles()[s.vehicle];
  if (remaining.empty()) {
    const double total = cost + s.inst.cost(s.vehicle, last, s.inst.end_vertex());
    if (total < s.best) {
      s.best = total;
      s.best_order = s.order;
    }
    return;
  }
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    const int r = remaining[k];
    if (r >= np && std::find(s.order.begin(), s.order.end(), r - np) == s.order.end()) continue;
    const double q = s.inst.requests()[r].demand;
    const double nl = load + q;
    if (nl < std::max(0.0, q) - 1e-9 || nl > std::min(veh.capacity, veh.capacity + q) + 1e-9) continue;
    remaining.erase(remaining.begin() + static_cast<long>(k));
    s.order.push_back(r);
    permute(s, remaining, nl, cost + s.inst.cost(s.vehicle, last, r + 1), r + 1);
    s.order.pop_back();
    remaining.insert(remaining.begin() + static_cast<long>(k), r);
  }
}

}  // namespace

OracleResult enumerate_routes_oracle(const Instance& instance) {
  const int n = instance.num_vehicles();
  const int np = instance.num_pickups();
  if (n > 3 || np > 3) throw std::invalid_argument("route oracle limited to N <= 3 and |P| <= 3");
  std::vector<std::vector<int>> allowed(n);
  for (int i = 0; i < n; ++i) allowed[i] = local_request_set(instance, i);

  OracleResult result;
  result.objective = std::numeric_limits<double>::infinity();
  std::vector<int> owner(np, 0);
  long combos = 1;
  for (int p = 0; p < np; ++p) combos *= n;
  for (long code = 0; code < combos; ++code) {
    long c = code;
    bool ok = true;
    for (int p = 0; p < np; ++p) {
      owner[p] = static_cast<int>(c % n);
      c /= n;
      const auto& a = allowed[owner[p]];
      if (!std::binary_search(a.begin(), a.end(), p)) ok = false;
    }
    if (!ok) continue;
    double total = 0.0;
    std::vector<Route> routes;
    for (int i = 0; i < n && ok; ++i) {
      std::vector<int> reqs;
      for (int p = 0; p < np; ++p) {
        if (owner[p] == i) {
          reqs.push_back(p);
          reqs.push_back(p + np);
        }
      }
      OracleSearch s{instance, i, {}, {}, std::numeric_limits<double>::infinity()};
      permute(s, reqs, instance.vehicles()[i].initial_load, 0.0, instance.start_vertex());
      if (!std::isfinite(s.best)) ok = false;
      total += s.best;
      routes.push_back({i, s.best_order});
    }
    if (ok && total < result.objective) {
      result.objective = total;
      result.routes = std::move(routes);
    }
  }
  return result;
}

}  // namespace pdvrp
