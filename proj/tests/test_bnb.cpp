#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "pdvrp/bnb.hpp"
#include "pdvrp/formulation.hpp"
#include "pdvrp/route_dp.hpp"

using namespace pdvrp;

TEST_CASE("two-lane instance: each vehicle takes its own lane") {
  const Instance inst = fixtures::two_lane_instance();
  const CentralizedModel cm = build_centralized_milp(inst);
  const MilpSolution sol = solve_milp(cm.model);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.gap == 0.0);
  CHECK(extract_route(cm.blocks[0], sol.x) == std::vector<int>{0, 2});
  CHECK(extract_route(cm.blocks[1], sol.x) == std::vector<int>{1, 3});

  const OracleResult oracle = enumerate_routes_oracle(inst);
  CHECK(std::abs(oracle.objective - sol.objective) <= 1e-6);
  CHECK(oracle.routes[0].requests == std::vector<int>{0, 2});
  CHECK(oracle.routes[1].requests == std::vector<int>{1, 3});
}

TEST_CASE("integral relaxation is solved at the root") {
  LinearModel m;
  m.add_variable({"a", 0, 1, 2.0, true});
  m.add_variable({"b", 0, 1, 1.0, true});
  m.add_row("r", {{0, 1.0}, {1, 1.0}}, Sense::GreaterEqual, 1.0);
  const MilpSolution sol = solve_milp(m);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.nodes == 1);
  CHECK(sol.objective == 1.0);
  CHECK(sol.x == std::vector<double>{0.0, 1.0});
}

TEST_CASE("infeasible and node-limited problems are reported distinctly") {
  LinearModel m;
  m.add_variable({"a", 0, 1, 1.0, true});
  m.add_row("lo", {{0, 1.0}}, Sense::GreaterEqual, 0.4);
  m.add_row("hi", {{0, 1.0}}, Sense::LessEqual, 0.6);
  CHECK(solve_milp(m).status == MilpStatus::Infeasible);

  const CentralizedModel cm = build_centralized_milp(fixtures::random_instance(2, 2, 2));
  MilpOptions opt;
  opt.node_limit = 1;
  const MilpSolution sol = solve_milp(cm.model, opt);
  if (sol.nodes >= 1 && sol.status != MilpStatus::Optimal) {
    CHECK(sol.status == MilpStatus::NodeLimit);
    CHECK(sol.gap > 0.0);
  }
}

TEST_CASE("branch and bound matches route enumeration on small instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = fixtures::random_instance(seed, 2, 2);
    const CentralizedModel cm = build_centralized_milp(inst);
    const MilpSolution sol = solve_milp(cm.model);
    REQUIRE(sol.status == MilpStatus::Optimal);
    const OracleResult oracle = enumerate_routes_oracle(inst);
    CHECK(std::abs(sol.objective - oracle.objective) <= 1e-6);
    CHECK(std::abs(solve_fleet_dp(inst).cost - oracle.objective) <= 1e-9);
  }
}

TEST_CASE("child LP bounds never drop below the parent") {
  const CentralizedModel cm = build_centralized_milp(fixtures::random_instance(7, 2, 2));
  MilpOptions opt;
  int checked = 0;
  bool ok = true;
  opt.on_node = [&](const NodeInfo& n) {
    if (n.parent < 0 || n.lp_status != LpStatus::Optimal) return;
    ++checked;
    if (n.lp_value < n.parent_lp_value - 1e-7) ok = false;
  };
  const MilpSolution sol = solve_milp(cm.model, opt);
  CHECK(sol.status == MilpStatus::Optimal);
  CHECK(ok);
  CHECK(checked > 0);
}

TEST_CASE("route oracle") {
  SUBCASE("single pair single vehicle") {
    const OracleResult r = enumerate_routes_oracle(fixtures::single_pair_instance());
    CHECK(r.objective == doctest::Approx(9.0));
    CHECK(r.routes[0].requests == std::vector<int>{0, 1});
  }
  SUBCASE("small vehicle cannot take the heavy pair") {
    // vehicle 0 starts next to both pairs but only fits the light one
    std::vector<Vehicle> v{{0, {5, 2}, 2.0, 0.0, 0.2}, {1, {0, 3}, 4.0, 0.0, 0.2}};
    std::vector<Request> r{{0, RequestKind::Pickup, {6, 1}, 1.0, 3.0, 2},
                           {1, RequestKind::Pickup, {6, 3}, 3.0, 3.0, 3},
                           {2, RequestKind::Delivery, {4, 1}, -1.0, 3.0, 0},
                           {3, RequestKind::Delivery, {4, 3}, -3.0, 3.0, 1}};
    const Instance inst(v, r);
    const OracleResult res = enumerate_routes_oracle(inst);
    // by hand: vehicle 1 must do pair 1, vehicle 0 pair 0
    CHECK(res.routes[0].requests == std::vector<int>{0, 2});
    CHECK(res.routes[1].requests == std::vector<int>{1, 3});
    const double expect = (std::sqrt(2.0) + 2.0) + (6.0 + 2.0);
    CHECK(res.objective == doctest::Approx(expect));
    const MilpSolution sol = solve_milp(build_centralized_milp(inst).model);
    CHECK(sol.objective == doctest::Approx(expect));
    CHECK(solve_fleet_dp(inst).cost == doctest::Approx(expect));
  }
  SUBCASE("guard") {
    CHECK_THROWS_AS(enumerate_routes_oracle(fixtures::random_instance(1, 4, 2)), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_routes_oracle(fixtures::random_instance(1, 2, 4)), std::invalid_argument);
  }
}

TEST_CASE("subset DP agrees with the oracle on three vehicles and three pairs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (bool het : {false, true}) {
      const Instance inst = fixtures::random_instance(seed, 3, 3, het);
      const FleetPlan plan = solve_fleet_dp(inst);
      const OracleResult oracle = enumerate_routes_oracle(inst);
      CHECK(std::abs(plan.cost - oracle.objective) <= 1e-9);
      const EvaluationReport rep = evaluate_routes(inst, plan.routes);
      CHECK(rep.feasible);
      CHECK(rep.cost == doctest::Approx(plan.cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-vehicle table reproduces its routes") {
  const Instance inst = fixtures::random_instance(12, 1, 3);
  const VehicleRouteTable table(inst, 0, local_request_set(inst, 0));
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    const std::vector<int> route = table.route(mask);
    CHECK(route.size() == 2u * static_cast<unsigned>(__builtin_popcount(mask)));
    CHECK(route_cost(inst, {0, route}) == doctest::Approx(table.cost(mask)).epsilon(1e-12));
  }
  CHECK((table.best_superset(1u) & 1u) == 1u);
}
