#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pdvrp/bnb.hpp"
#include "pdvrp/evaluate.hpp"
#include "pdvrp/formulation.hpp"
#include "pdvrp/route_dp.hpp"
#include "pdvrp/simplex.hpp"

using namespace pdvrp;

namespace {

int arc_index(const TaskGraph& g, int from, int to) {
  for (int a = 0; a < g.num_arcs(); ++a) {
    if (g.arcs[a].from == from && g.arcs[a].to == to) return a;
  }
  return -1;
}

}  // namespace

TEST_CASE("time upper bound") {
  SUBCASE("all locations coincide and no service time") {
    std::vector<Vehicle> v{{0, {1.0, 1.0}, 2.0, 0.0, 0.2}};
    std::vector<Request> r{{0, RequestKind::Pickup, {1.0, 1.0}, 1.0, 0.0, 1},
                           {1, RequestKind::Delivery, {1.0, 1.0}, -1.0, 0.0, 0}};
    CHECK(time_upper_bound(Instance(v, r), 0) == 0.0);
  }
  SUBCASE("direct sum over admissible vertex pairs") {
    const Instance inst = fixtures::random_instance(5, 2, 2);
    const int nv = inst.num_vertices();
    for (int i = 0; i < 2; ++i) {
      double expect = 0.0;
      int arcs = 0;
      for (int j = 0; j < nv; ++j) {
        for (int k = 0; k < nv; ++k) {
          if (j == k || j == inst.end_vertex() || k == inst.start_vertex()) continue;
          expect += inst.travel_time(i, j, k);
          ++arcs;
        }
      }
      for (int j = 0; j < inst.num_requests(); ++j) expect += inst.requests()[j].service_time;
      CHECK(arcs == 21);
      CHECK(time_upper_bound(inst, i) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("big-M constants are non-negative and follow their definitions") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = fixtures::random_instance(seed, 2, 3);
    const TaskGraph g = build_task_graph(inst);
    const BigMData m = compute_big_m(inst, g, 0);
    const double cap = inst.vehicles()[0].capacity;
    for (int a = 0; a < g.num_arcs(); ++a) {
      const Arc& arc = g.arcs[a];
      const double qj = inst.vertex_demand(arc.from), qk = inst.vertex_demand(arc.to);
      const double hi_j = std::min(cap, cap + qj), hi_k = std::min(cap, cap + qk);
      const double lo_j = std::max(0.0, qj);
      CHECK(m.w_upper[a] == std::max(0.0, hi_j + qk));
      CHECK(m.w_lower[a] == std::max(0.0, hi_k - qk - lo_j));
      CHECK(m.m_time[a] >= m.b_bar);
    }
  }
}

TEST_CASE("row counts match a rule-by-rule tally") {
  for (int np : {1, 2, 3}) {
    const Instance inst = fixtures::random_instance(3, 1, np);
    LinearModel model;
    const LocalBlock blk = add_local_constraints(model, inst, build_task_graph(inst), 0);
    const int nr = 2 * np;
    const int arcs = (nr + 1) * (nr + 1) - nr;
    const int tally = 1 + 1 + nr + np + np + 3 * arcs;
    CHECK(model.num_rows() == tally);
    const LocalRowCounts c = local_row_counts(blk, model);
    CHECK(c.start == 1);
    CHECK(c.end == 1);
    CHECK(c.flow == nr);
    CHECK(c.pairing == np);
    CHECK(c.precedence == np);
    CHECK(c.time == arcs);
    CHECK(c.load_lower == arcs);
    CHECK(c.load_upper == arcs);
    CHECK(model.num_variables() == arcs + 2 * (nr + 2));
    if (np == 1) CHECK(tally == 27);
  }
}

TEST_CASE("hand-built route point satisfies every row") {
  const Instance inst = fixtures::single_pair_instance();
  const TaskGraph g = build_task_graph(inst);
  LinearModel model;
  const LocalBlock blk = add_local_constraints(model, inst, g, 0);
  // s -> P1 -> D1 -> e, vertices 0, 1, 2, 3
  std::vector<double> x(model.num_variables(), 0.0);
  x[blk.x(arc_index(g, 0, 1))] = 1.0;
  x[blk.x(arc_index(g, 1, 2))] = 1.0;
  x[blk.x(arc_index(g, 2, 3))] = 1.0;
  // travel 5 m at 0.2 m/s, service 3 s, travel 4 m, service 5 s
  x[blk.b(1)] = 25.0;
  x[blk.b(2)] = 25.0 + 3.0 + 20.0;
  x[blk.b(3)] = 48.0 + 5.0;
  x[blk.q(0)] = 0.0;
  x[blk.q(1)] = 2.0;
  x[blk.q(2)] = 0.0;
  x[blk.q(3)] = 0.0;
  CHECK(model.max_violation(x) <= 1e-12);
  CHECK(model.objective(x) == doctest::Approx(9.0));

  std::vector<double> y(model.num_variables(), 0.0);
  route_to_point(inst, blk, {0, 1}, y);
  CHECK(model.max_violation(y) <= 1e-12);
  CHECK(extract_route(blk, y) == std::vector<int>{0, 1});
}

TEST_CASE("delivery before pickup violates the precedence row") {
  const Instance inst = fixtures::single_pair_instance();
  const TaskGraph g = build_task_graph(inst);
  LinearModel model;
  const LocalBlock blk = add_local_constraints(model, inst, g, 0);
  std::vector<double> x(model.num_variables(), 0.0);
  x[blk.x(arc_index(g, 0, 2))] = 1.0;
  x[blk.x(arc_index(g, 2, 1))] = 1.0;
  x[blk.x(arc_index(g, 1, 3))] = 1.0;
  x[blk.b(2)] = 15.0;
  x[blk.b(1)] = 15.0 + 5.0 + 20.0;
  x[blk.b(3)] = 40.0 + 3.0;
  bool precedence_violated = false;
  for (int r : model.violated_rows(x, 1e-9)) {
    if (model.row(r).name.find("prec") != std::string::npos) precedence_violated = true;
  }
  CHECK(precedence_violated);
}

TEST_CASE("linearized time and load rows are equivalent to the implications") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Instance inst = fixtures::random_instance(seed, 1, 1);
    REQUIRE(build_task_graph(inst).num_arcs() == 7);
    const oracles::LinearizationCheck r = oracles::check_linearization(inst, seed);
    CHECK(r.mismatches == 0);
    CHECK(r.checked == 128L * 328L * 7L);
  }
}

TEST_CASE("coupling rows") {
  const Instance inst = fixtures::random_instance(4, 2, 2);
  LinearModel model;
  std::vector<LocalBlock> blocks;
  for (int i = 0; i < 2; ++i) blocks.push_back(add_local_constraints(model, inst, build_task_graph(inst), i));
  const std::vector<int> rows = add_coupling_rows(model, blocks, 4, 1.0);
  REQUIRE(rows.size() == 4);
  for (int r : rows) {
    CHECK(model.row(r).terms.size() == 2u * 4u);
    CHECK(model.row(r).sense == Sense::GreaterEqual);
  }
  // exactly one vehicle per request: all coupling rows tight
  std::vector<double> x(model.num_variables(), 0.0);
  route_to_point(inst, blocks[0], {0, 2}, x);
  route_to_point(inst, blocks[1], {1, 3}, x);
  CHECK(model.max_violation(x) <= 1e-9);
  for (int r : rows) CHECK(model.row_activity(r, x) == 1.0);
}

TEST_CASE("relaxed coupling with rhs 0.9 admits fractional arcs") {
  const Instance inst = fixtures::two_lane_instance();
  LinearModel model;
  std::vector<LocalBlock> blocks;
  for (int i = 0; i < 2; ++i) blocks.push_back(add_local_constraints(model, inst, build_task_graph(inst), i));
  const std::vector<int> rows = add_coupling_rows(model, blocks, 4, 0.9);
  const LpSolution sol = solve_lp(lp_relaxation(model));
  REQUIRE(sol.status == LpStatus::Optimal);
  bool fractional = false;
  for (int r : rows) {
    const double act = model.row_activity(r, sol.primal);
    CHECK(act >= 0.9 - 1e-7);
    if (std::abs(act - 0.9) <= 1e-7) fractional = true;
  }
  CHECK(fractional);
  const CentralizedModel cm = build_centralized_milp(inst);
  const MilpSolution mip = solve_milp(cm.model);
  REQUIRE(mip.status == MilpStatus::Optimal);
  CHECK(sol.objective <= mip.objective + 1e-9);
}

TEST_CASE("centralized model: single vehicle single pair has its forced cost") {
  const Instance inst = fixtures::single_pair_instance();
  const CentralizedModel cm = build_centralized_milp(inst);
  CHECK(cm.coupling_rows.size() == 2);
  const MilpSolution sol = solve_milp(cm.model);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0 + 4.0 + 0.0));
  CHECK(extract_route(cm.blocks[0], sol.x) == std::vector<int>{0, 1});
}

TEST_CASE("relaxation value never exceeds the integer optimum") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = fixtures::random_instance(seed, 2, 2);
    const CentralizedModel cm = build_centralized_milp(inst);
    const LpSolution relaxed = solve_lp(lp_relaxation(cm.model));
    REQUIRE(relaxed.status == LpStatus::Optimal);
    const FleetPlan plan = solve_fleet_dp(inst);
    CHECK(relaxed.objective <= plan.cost + 1e-7);
  }
  const LinearModel pure = lp_relaxation(build_centralized_milp(fixtures::single_pair_instance()).model);
  CHECK(lp_relaxation(pure) == pure);
}

TEST_CASE("heterogeneous centralized model drops unreachable requests") {
  std::vector<Vehicle> v{{0, {0, 0}, 2.0, 0.0, 0.2}, {1, {1, 0}, 4.0, 0.0, 0.2}};
  std::vector<Request> r{{0, RequestKind::Pickup, {5, 1}, 1.0, 3.0, 2},
                         {1, RequestKind::Pickup, {5, 3}, 3.0, 3.0, 3},
                         {2, RequestKind::Delivery, {1, 1}, -1.0, 3.0, 0},
                         {3, RequestKind::Delivery, {1, 3}, -3.0, 3.0, 1}};
  const Instance inst(v, r);
  const CentralizedModel cm = build_centralized_milp(inst);
  CHECK(cm.blocks[0].graph.requests == std::vector<int>{0, 2});
  CHECK(cm.blocks[1].graph.requests == std::vector<int>{0, 1, 2, 3});
  CHECK(cm.model.row(cm.coupling_rows[1]).terms.size() == cm.blocks[1].out_arcs_of_request(1).size());
}

TEST_CASE("models are rebuilt identically and export as LP text") {
  const Instance inst = fixtures::random_instance(9, 2, 2);
  const CentralizedModel a = build_centralized_milp(inst);
  const CentralizedModel b = build_centralized_milp(inst);
  CHECK(a.model == b.model);
  std::ostringstream sa, sb;
  a.model.write_lp_format(sa);
  b.model.write_lp_format(sb);
  CHECK(sa.str() == sb.str());
  const std::string text = sa.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("General") != std::string::npos);
  CHECK(text.find("v0_start: + 1.000000000000 v0_x_s_P1") != std::string::npos);
}

TEST_CASE("every feasible centralized point restricted to a vehicle passes the evaluator") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = fixtures::random_instance(seed, 2, 2);
    const CentralizedModel cm = build_centralized_milp(inst);
    const MilpSolution sol = solve_milp(cm.model);
    REQUIRE(sol.status == MilpStatus::Optimal);
    std::vector<Route> routes;
    for (const LocalBlock& blk : cm.blocks) {
      const TaskGraph& g = blk.graph;
      std::vector<double> x(g.num_arcs()), b(g.num_vertices()), q(g.num_vertices());
      for (int a = 0; a < g.num_arcs(); ++a) x[a] = sol.x[blk.x(a)];
      for (int p = 0; p < g.num_vertices(); ++p) {
        b[p] = sol.x[blk.b(p)];
        q[p] = sol.x[blk.q(p)];
      }
      const auto problems = check_local_point(inst, g, blk.vehicle, x, b, q, 1e-6);
      CHECK(problems.empty());
      routes.push_back({blk.vehicle, extract_route(blk, sol.x)});
    }
    const EvaluationReport rep = evaluate_routes(inst, routes);
    CHECK(rep.feasible);
    CHECK(rep.cost == doctest::Approx(sol.objective).epsilon(1e-9));
  }
}
