#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "pdvrp/evaluate.hpp"
#include "pdvrp/formulation.hpp"
#include "pdvrp/primal_decomp.hpp"
#include "pdvrp/route_dp.hpp"
#include "pdvrp/simplex.hpp"

using namespace pdvrp;

namespace {

AgentConfig config_with(SubproblemKind kind) {
  AgentConfig c;
  c.subproblem = kind;
  return c;
}

}  // namespace

TEST_CASE("step size schedule") {
  AgentConfig c;
  CHECK(step_size(0, c) == 0.005);
  CHECK(step_size(124, c) == 0.005 / 125);
  CHECK(step_size(125, c) == 0.005 / 125);
  CHECK(step_size(249, c) == 0.005 / 125);
  CHECK(step_size(1, c) == 0.0025);
  CHECK_THROWS_AS(step_size(-1, c), std::invalid_argument);
  // diminishing part: positive, non-increasing, divergent partial sums
  double sum = 0.0;
  for (int t = 0; t < c.step_switch; ++t) {
    CHECK(step_size(t, c) > 0.0);
    if (t > 0) CHECK(step_size(t, c) <= step_size(t - 1, c));
    sum += step_size(t, c);
  }
  CHECK(sum > 5.0 * c.step_k);
}

TEST_CASE("configuration validation") {
  AgentConfig c;
  CHECK_NOTHROW(validate(c));
  c.delta = 1.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.delta = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = AgentConfig{};
  c.iterations = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = AgentConfig{};
  c.penalty = -1.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("allocation update") {
  SUBCASE("equal multipliers leave y unchanged") {
    const std::vector<double> y{0.3, -0.1, 0.7};
    const std::vector<double> mu{1.0, 2.0, 3.0};
    CHECK(update_allocation(y, mu, {&mu, &mu}, 0.5) == y);
  }
  SUBCASE("scalar example") {
    const std::vector<double> mu_l{0.5};
    const auto y = update_allocation({0.45}, {1.0}, {&mu_l}, 0.1);
    CHECK(y[0] == doctest::Approx(0.40).epsilon(1e-15));
  }
  SUBCASE("no neighbors") { CHECK(update_allocation({0.2}, {7.0}, {}, 1.0) == std::vector<double>{0.2}); }
  SUBCASE("missing message is an error") {
    CHECK_THROWS_AS(update_allocation({0.2}, {1.0}, {nullptr}, 0.1), std::invalid_argument);
    const std::vector<double> short_mu;
    CHECK_THROWS_AS(update_allocation({0.2}, {1.0}, {&short_mu}, 0.1), std::invalid_argument);
  }
  SUBCASE("network sum is preserved on a complete graph") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const int n = 6, m = 4;
    std::vector<std::vector<double>> y(n, std::vector<double>(m, 0.9 / n)), mu(n, std::vector<double>(m));
    for (int round = 0; round < 50; ++round) {
      for (auto& v : mu)
        for (double& x : v) x = u(rng);
      std::vector<std::vector<double>> next;
      for (int i = 0; i < n; ++i) {
        std::vector<const std::vector<double>*> nb;
        for (int l = 0; l < n; ++l)
          if (l != i) nb.push_back(&mu[l]);
        next.push_back(update_allocation(y[i], mu[i], nb, 0.01));
      }
      y = next;
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += y[i][j];
        CHECK(std::abs(s - 0.9) <= 1e-12);
      }
    }
  }
}

TEST_CASE("running average") {
  RunningAverage avg;
  CHECK(avg.empty());
  CHECK_THROWS_AS(avg.mean(), std::logic_error);
  for (int k = 0; k < 5; ++k) avg.add(0.3, {0.7});
  CHECK(avg.mean()[0] == doctest::Approx(0.7).epsilon(1e-15));

  RunningAverage two;
  two.add(1.0, {0.2});
  two.add(1.0, {0.4});
  CHECK(two.mean()[0] == doctest::Approx(0.3).epsilon(1e-15));

  RunningAverage weighted;
  weighted.add(3.0, {1.0});
  weighted.add(1.0, {0.0});
  CHECK(weighted.mean()[0] == 0.75);
}

TEST_CASE("thresholding caps at one and passes negatives") {
  const auto y = threshold_allocation({1.3, 0.4, -0.2, 1.0});
  CHECK(y == std::vector<double>{1.0, 0.4, -0.2, 1.0});
  const std::vector<char> mask{1, 0, 0, 1};
  const auto h = threshold_allocation({1.3, 0.4, -0.2, 0.5}, &mask);
  CHECK(h == std::vector<double>{1.0, 0.0, -0.2, 0.5});
}

TEST_CASE("default penalty") {
  const Instance inst = fixtures::single_pair_instance();
  const TaskGraph g = build_task_graph(inst);
  double sum = 0.0;
  for (const Arc& a : g.arcs) sum += inst.cost(0, a.from, a.to);
  CHECK(default_penalty(inst, false) == doctest::Approx(50.0 * sum));
}

TEST_CASE("agent starts from delta over N") {
  const Instance inst = fixtures::random_instance(4, 3, 2);
  AgentConfig c;
  for (int i = 0; i < 3; ++i) {
    Agent a(inst, i, 3, c, 100.0);
    for (double y : a.allocation()) CHECK(y == c.delta / 3.0);
    CHECK(a.iteration() == 0);
  }
}

TEST_CASE("subproblem with zero allocation") {
  for (SubproblemKind kind : {SubproblemKind::Relaxation, SubproblemKind::Hull}) {
    const Instance inst = fixtures::two_lane_instance();
    Agent a(inst, 0, 2, config_with(kind), default_penalty(inst, false));
    a.set_allocation(std::vector<double>(4, 0.0));
    const SubproblemResult& r = a.solve_subproblem();
    CHECK(r.violation == 0.0);
    // cheapest local tour is the direct leg to the physical end
    CHECK(r.objective == doctest::Approx(inst.cost(0, 0, inst.end_vertex())).epsilon(1e-9));
    for (double m : r.mu) CHECK(m >= 0.0);
  }
}

TEST_CASE("allocation above one forces the penalty and bounds the multiplier") {
  const Instance inst = fixtures::single_pair_instance();
  const double M = 1000.0;
  Agent hull(inst, 0, 1, config_with(SubproblemKind::Hull), M);
  hull.set_allocation({1.5, 0.2});
  const SubproblemResult h = hull.solve_subproblem();
  CHECK(h.violation == doctest::Approx(0.5).epsilon(1e-9));
  // the only valid tour costs 9, so objective = 9 + 0.5 M
  CHECK(h.objective == doctest::Approx(9.0 + 0.5 * M).epsilon(1e-9));
  CHECK(h.mu[0] == doctest::Approx(M).epsilon(1e-9));
  CHECK(h.mu[1] == doctest::Approx(0.0));

  // fractional subtours let the relaxation cover part of the excess
  Agent relax(inst, 0, 1, config_with(SubproblemKind::Relaxation), M);
  relax.set_allocation({1.5, 0.2});
  const SubproblemResult& r = relax.solve_subproblem();
  CHECK(r.violation > 0.0);
  CHECK(r.violation <= 0.5 + 1e-9);
  CHECK(r.objective <= h.objective + 1e-7);
  for (double m : r.mu) {
    CHECK(m >= 0.0);
    CHECK(m <= M);
  }
}

TEST_CASE("hull subproblem is never below the relaxed one") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = fixtures::random_instance(seed, 3, 3);
    const double M = default_penalty(inst, false);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.2, 0.8);
    for (int i = 0; i < 3; ++i) {
      Agent relax(inst, i, 3, config_with(SubproblemKind::Relaxation), M);
      Agent hull(inst, i, 3, config_with(SubproblemKind::Hull), M);
      for (int k = 0; k < 5; ++k) {
        std::vector<double> y(6);
        for (double& v : y) v = u(rng);
        relax.set_allocation(y);
        hull.set_allocation(y);
        CHECK(relax.solve_subproblem().objective <= hull.solve_subproblem().objective + 1e-7);
      }
    }
  }
}

TEST_CASE("hull subproblem equals the mixture of cheapest routes") {
  // one pair: covering y of it costs y times the single route
  const Instance inst = fixtures::single_pair_instance();
  Agent a(inst, 0, 1, AgentConfig{}, 1000.0);
  for (double y : {0.0, 0.1, 0.45, 0.9, 1.0}) {
    a.set_allocation({y, y / 2});
    CHECK(a.solve_subproblem().objective == doctest::Approx(9.0 * y).epsilon(1e-12));
  }
}

TEST_CASE("uniform start: agent values sum to at least the master optimum") {
  // sum_i p_i(delta/N) >= min { sum_i p_i(y_i) : sum_i y_i = delta }, and the
  // master optimum is delta times the optimum of the route-mixture LP.
  const Instance inst = fixtures::two_lane_instance();
  const int n = 2;
  AgentConfig c;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    Agent a(inst, i, n, c, default_penalty(inst, false));
    total += a.solve_subproblem().objective;
  }
  LinearModel master;
  const int np = inst.num_pickups();
  std::vector<std::vector<Term>> cover(np);
  for (int i = 0; i < n; ++i) {
    const VehicleRouteTable t(inst, i, local_request_set(inst, i));
    std::vector<Term> convex;
    for (std::uint32_t pm = 0; pm < (1u << np); ++pm) {
      const int col = master.add_variable({"w", 0.0, kInfinity, t.cost(pm), false});
      convex.push_back({col, 1.0});
      for (int p = 0; p < np; ++p)
        if (pm >> p & 1u) cover[p].push_back({col, 1.0});
    }
    master.add_row("convex", convex, Sense::Equal, 1.0);
  }
  for (int p = 0; p < np; ++p) master.add_row("cover", cover[p], Sense::GreaterEqual, c.delta);
  const LpSolution ms = solve_lp(master);
  REQUIRE(ms.status == LpStatus::Optimal);
  CHECK(total >= ms.objective - 1e-9);
  // each agent's value at the uniform start stays below the relaxed
  // centralized optimum on this instance
  const LpSolution central = solve_lp(lp_relaxation(build_centralized_milp(inst).model));
  REQUIRE(central.status == LpStatus::Optimal);
  for (SubproblemKind kind : {SubproblemKind::Relaxation, SubproblemKind::Hull}) {
    for (int i = 0; i < n; ++i) {
      Agent a(inst, i, n, config_with(kind), default_penalty(inst, false));
      CHECK(a.solve_subproblem().objective <= central.objective + 1e-9);
    }
  }
}

TEST_CASE("final problem") {
  SUBCASE("zero allocation gives the cheapest tour") {
    const Instance inst = fixtures::two_lane_instance();
    Agent a(inst, 0, 2, AgentConfig{}, 100.0);
    const FinalRoute r = a.finish({0.0, 0.0, 0.0, -0.3});
    CHECK(r.requests.empty());
    CHECK(r.cost == doctest::Approx(inst.cost(0, 0, inst.end_vertex())));
  }
  SUBCASE("one positive component on a single pair") {
    const Instance inst = fixtures::single_pair_instance();
    for (FinalSolver fs : {FinalSolver::SubsetDp, FinalSolver::BranchAndBound}) {
      AgentConfig c;
      c.final_solver = fs;
      Agent a(inst, 0, 1, c, 100.0);
      const FinalRoute r = a.finish({0.2, 0.0});
      CHECK(r.requests == std::vector<int>{0, 1});
      CHECK(r.cost == doctest::Approx(9.0));
      CHECK(check_local_point(inst, a.block().graph, 0, r.x, r.b, r.q).empty());
    }
  }
  SUBCASE("dp and branch and bound agree on random allocations") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const Instance inst = fixtures::random_instance(seed, 2, 2);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-0.5, 1.2);
      AgentConfig dp, bb;
      bb.final_solver = FinalSolver::BranchAndBound;
      Agent a(inst, 0, 2, dp, 100.0), b(inst, 0, 2, bb, 100.0);
      for (int k = 0; k < 4; ++k) {
        std::vector<double> y(4);
        for (double& v : y) v = u(rng);
        const FinalRoute ra = a.finish(y), rb = b.finish(y);
        CHECK(ra.cost == doctest::Approx(rb.cost).epsilon(1e-9));
        for (int j = 0; j < 4; ++j) {
          if (std::min(y[j], 1.0) > 1e-6) {
            CHECK(std::count(ra.requests.begin(), ra.requests.end(), j) == 1);
            CHECK(std::count(rb.requests.begin(), rb.requests.end(), j) == 1);
          }
        }
        CHECK(check_local_point(inst, b.block().graph, 0, rb.x, rb.b, rb.q).empty());
      }
    }
  }
  SUBCASE("heterogeneous agent never takes a request outside its set") {
    std::vector<Vehicle> v{{0, {5, 2}, 2.0, 0.0, 0.2}, {1, {0, 3}, 4.0, 0.0, 0.2}};
    std::vector<Request> r{{0, RequestKind::Pickup, {6, 1}, 1.0, 3.0, 2},
                           {1, RequestKind::Pickup, {6, 3}, 3.0, 3.0, 3},
                           {2, RequestKind::Delivery, {4, 1}, -1.0, 3.0, 0},
                           {3, RequestKind::Delivery, {4, 3}, -3.0, 3.0, 1}};
    const Instance inst(v, r);
    AgentConfig c;
    c.local_sets = true;
    Agent small(inst, 0, 2, c, 1000.0);
    CHECK(small.local_mask() == std::vector<char>{1, 0, 1, 0});
    const FinalRoute fr = small.finish({0.4, 0.4, 0.4, 0.4});
    CHECK(fr.requests == std::vector<int>{0, 2});
    // a positive share of a foreign request costs the penalty
    small.set_allocation({0.0, 0.3, 0.0, 0.0});
    const SubproblemResult& sp = small.solve_subproblem();
    CHECK(sp.violation == doctest::Approx(0.3));
    CHECK(sp.mu[1] == doctest::Approx(1000.0));
  }
}

TEST_CASE("final model has one covering row per request") {
  const Instance inst = fixtures::two_lane_instance();
  Agent a(inst, 1, 2, AgentConfig{}, 100.0);
  std::vector<int> rows;
  const LinearModel m = build_final_milp(inst, a.block(), {0.5, 0.0, 1.0, -1.0}, &rows);
  REQUIRE(rows.size() == 4u);
  CHECK(m.row(rows[0]).rhs == 0.5);
  CHECK(m.row(rows[3]).rhs == -1.0);
  CHECK(m.row(rows[2]).sense == Sense::GreaterEqual);
  CHECK(m.has_integers());
}

TEST_CASE("agent round bookkeeping") {
  const Instance inst = fixtures::random_instance(3, 2, 2);
  AgentConfig c;
  c.iterations = 10;
  c.step_switch = 4;
  Agent a(inst, 0, 2, c, 100.0), b(inst, 1, 2, c, 100.0);
  std::vector<double> expect_sum_w(4, 0.0), expect_sum(4, 0.0);
  for (int t = 0; t < c.iterations; ++t) {
    a.solve_subproblem();
    b.solve_subproblem();
    const std::vector<double> mu_a = a.multipliers(), mu_b = b.multipliers();
    a.apply_update({&mu_b});
    b.apply_update({&mu_a});
    CHECK(a.iteration() == t + 1);
    if (t + 1 > c.step_switch) {
      for (int j = 0; j < 4; ++j) {
        expect_sum[j] += step_size(t + 1, c) * a.allocation()[j];
        expect_sum_w[j] += step_size(t + 1, c);
      }
    }
  }
  const std::vector<double> avg = a.final_allocation();
  for (int j = 0; j < 4; ++j) CHECK(avg[j] == doctest::Approx(expect_sum[j] / expect_sum_w[j]).epsilon(1e-12));
  c.averaging = false;
  Agent raw(inst, 0, 2, c, 100.0);
  CHECK(raw.final_allocation() == raw.allocation());
}
