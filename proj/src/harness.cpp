#include "pdvrp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "pdvrp/bnb.hpp"
#include "pdvrp/evaluate.hpp"
#include "pdvrp/formulation.hpp"
#include "pdvrp/mission.hpp"
#include "pdvrp/route_dp.hpp"

namespace pdvrp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Sum over vehicles of the arc values leaving each request must be a
// non-negative integer matching the number of visits.
bool coverage_is_integral(const Instance& inst, const std::vector<FinalRoute>& routes, bool local_sets,
                          const std::vector<int>& visits) {
  std::vector<double> lhs(inst.num_requests(), 0.0);
  for (const FinalRoute& r : routes) {
    const TaskGraph g = local_sets ? build_task_graph(inst, local_request_set(inst, r.vehicle))
                                   : build_task_graph(inst);
    if (static_cast<int>(r.x.size()) != g.num_arcs()) return false;
    for (int a = 0; a < g.num_arcs(); ++a) {
      const int j = inst.vertex_request(g.arcs[a].from);
      if (j >= 0) lhs[j] += r.x[a];
    }
  }
  for (int j = 0; j < inst.num_requests(); ++j) {
    if (std::abs(lhs[j] - std::round(lhs[j])) > 1e-9) return false;
    if (lhs[j] < 0.0 || (lhs[j] > 0.0 && lhs[j] < 1.0)) return false;
    if (static_cast<int>(std::lround(lhs[j])) != visits[j]) return false;
  }
  return true;
}

}  // namespace

Instance make_trial_instance(const TrialConfig& c) {
  GeneratorOptions o;
  o.seed = c.seed;
  o.n_vehicles = c.vehicles;
  o.n_pickups = c.pickups;
  o.area = c.area;
  o.heterogeneous = c.heterogeneous;
  if (c.heterogeneous) {
    // capacities straddle the demand range so some vehicles miss some pairs
    o.capacity = {1.0, 4.0};
    o.demand = {1.0, 3.0};
  }
  return generate_random_instance(o);
}

TrialResult run_trial(const TrialConfig& c) {
  TrialResult res;
  res.seed = c.seed;
  res.vehicles = c.vehicles;
  res.pickups = c.pickups;
  res.delta = c.run.agent.delta;
  try {
    return run_trial(c, make_trial_instance(c));
  } catch (const std::exception& e) {
    res.failure = e.what();
    return res;
  }
}

TrialResult run_trial(const TrialConfig& c, const Instance& inst) {
  TrialResult res;
  res.seed = c.seed;
  res.vehicles = inst.num_vehicles();
  res.pickups = inst.num_pickups();
  res.delta = c.run.agent.delta;
  try {
    RunOptions run = c.run;
    run.agent.local_sets = run.agent.local_sets || !is_homogeneous(inst);
    run.keep_trace = false;
    const CommGraph graph = build_comm_graph(c.graph, inst.num_vehicles(), c.graph_seed ? c.graph_seed : c.seed);
    std::unique_ptr<Executor> exec;
    if (c.workers > 1)
      exec = std::make_unique<ThreadExecutor>(c.workers);
    else
      exec = std::make_unique<SerialExecutor>();

    auto t0 = Clock::now();
    const RunResult rr = run_synchronous(inst, graph, run, *exec);
    res.distributed_seconds = seconds_since(t0);
    res.max_conservation_error = rr.max_conservation_error;
    if (!rr.probes.empty()) res.t_delta = empirical_t_delta(rr.probes, run.agent.iterations);

    const std::vector<Route> routes = to_routes(rr.routes);
    const EvaluationReport rep = evaluate_routes(inst, routes);
    res.feasible = rep.feasible;
    if (!rep.feasible) res.failure = rep.violations.front();
    for (const FinalRoute& r : rr.routes) {
      const TaskGraph g = run.agent.local_sets ? build_task_graph(inst, local_request_set(inst, r.vehicle))
                                               : build_task_graph(inst);
      const auto bad = check_local_point(inst, g, r.vehicle, r.x, r.b, r.q);
      if (!bad.empty()) {
        res.feasible = false;
        res.failure = "vehicle " + std::to_string(r.vehicle) + ": " + bad.front();
      }
      if (!r.requests.empty()) ++res.active_vehicles;
    }
    res.coverage_integral = coverage_is_integral(inst, rr.routes, run.agent.local_sets, rep.coverage);
    res.planned_cost = rep.cost;

    if (res.feasible) {
      const ExecutionReport ex = playback(inst, routes);
      res.actuated_cost = ex.actuated_cost;
      res.all_served = ex.all_served();
    }

    t0 = Clock::now();
    if (c.baseline == Baseline::SubsetDp) {
      res.optimal_cost = solve_fleet_dp(inst).cost;
    } else {
      MilpOptions mo;
      mo.node_limit = c.bnb_node_limit;
      const MilpSolution sol = solve_milp(build_centralized_milp(inst).model, mo);
      if (sol.status != MilpStatus::Optimal) {
        res.usable = false;
        if (res.failure.empty()) res.failure = std::string("baseline ") + to_string(sol.status);
      }
      res.optimal_cost = sol.objective;
    }
    res.baseline_seconds = seconds_since(t0);
    if (res.usable && res.optimal_cost > 0.0) {
      res.planned_error = (res.planned_cost - res.optimal_cost) / res.optimal_cost;
      res.actuated_error = (res.actuated_cost - res.optimal_cost) / res.optimal_cost;
    }
    if (res.usable && res.feasible && res.planned_error < -1e-9) {
      res.feasible = false;
      res.failure = "distributed cost below the proven optimum";
    }
  } catch (const std::exception& e) {
    res.feasible = false;
    res.failure = e.what();
  }
  return res;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials) {
  std::vector<std::tuple<int, int, double>> order;
  std::map<std::tuple<int, int, double>, std::vector<const TrialResult*>> groups;
  for (const TrialResult& t : trials) {
    const auto key = std::make_tuple(t.vehicles, t.pickups, t.delta);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&t);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    CellSummary s;
    std::tie(s.vehicles, s.pickups, s.delta) = key;
    std::vector<double> planned;
    double actuated = 0.0, opt = 0.0, cost = 0.0;
    int probed = 0, zero = 0;
    for (const TrialResult* t : groups[key]) {
      ++s.trials;
      if (t->feasible) ++s.feasible;
      if (t->t_delta >= 0) {
        ++probed;
        if (t->t_delta == 0) ++zero;
      }
      if (!t->usable || !t->feasible) continue;
      ++s.usable;
      planned.push_back(t->planned_error);
      actuated += t->actuated_error;
      opt += t->optimal_cost;
      cost += t->planned_cost;
    }
    if (!planned.empty()) {
      const double n = static_cast<double>(planned.size());
      double sum = 0.0;
      for (double e : planned) sum += e;
      s.mean_planned_error = sum / n;
      s.median_planned_error = percentile(planned, 0.5);
      s.p25_planned_error = percentile(planned, 0.25);
      s.p75_planned_error = percentile(planned, 0.75);
      s.mean_actuated_error = actuated / n;
      s.mean_optimal_cost = opt / n;
      s.mean_planned_cost = cost / n;
    }
    if (probed > 0) s.t_delta_zero_fraction = static_cast<double>(zero) / probed;
    out.push_back(s);
  }
  return out;
}

MonteCarloResult run_montecarlo(const Sweep& sweep) {
  std::vector<TrialConfig> configs;
  for (int n : sweep.vehicles) {
    for (int p : sweep.pickups) {
      for (double d : sweep.deltas) {
        for (int k = 0; k < sweep.trials; ++k) {
          TrialConfig c = sweep.base;
          c.vehicles = n;
          c.pickups = p;
          c.run.agent.delta = d;
          c.seed = sweep.first_seed + static_cast<std::uint64_t>(k);
          c.workers = 1;
          configs.push_back(c);
        }
      }
    }
  }
  MonteCarloResult mc;
  mc.trials.resize(configs.size());
  ThreadExecutor pool(sweep.base.workers);
  pool.run(static_cast<int>(configs.size()), [&](int k) { mc.trials[k] = run_trial(configs[k]); });
  mc.cells = summarize(mc.trials);
  return mc;
}

void write_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "seed,vehicles,pickups,delta,feasible,usable,planned_cost,actuated_cost,optimal_cost,"
         "planned_error,actuated_error,t_delta,active_vehicles,conservation_error,distributed_seconds,"
         "baseline_seconds\n";
  char buf[512];
  for (const TrialResult& t : trials) {
    std::snprintf(buf, sizeof buf, "%llu,%d,%d,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.3g,%.4f,%.4f\n",
                  static_cast<unsigned long long>(t.seed), t.vehicles, t.pickups, t.delta, t.feasible ? 1 : 0,
                  t.usable ? 1 : 0, t.planned_cost, t.actuated_cost, t.optimal_cost, t.planned_error,
                  t.actuated_error, t.t_delta, t.active_vehicles, t.max_conservation_error,
                  t.distributed_seconds, t.baseline_seconds);
    out << buf;
  }
}

void write_summary_json(std::ostream& out, const std::vector<CellSummary>& cells) {
  nlohmann::json j = nlohmann::json::array();
  for (const CellSummary& s : cells) {
    j.push_back({{"vehicles", s.vehicles},
                 {"pickups", s.pickups},
                 {"delta", s.delta},
                 {"trials", s.trials},
                 {"usable", s.usable},
                 {"feasible", s.feasible},
                 {"mean_planned_error", s.mean_planned_error},
                 {"median_planned_error", s.median_planned_error},
                 {"p25_planned_error", s.p25_planned_error},
                 {"p75_planned_error", s.p75_planned_error},
                 {"mean_actuated_error", s.mean_actuated_error},
                 {"mean_optimal_cost", s.mean_optimal_cost},
                 {"mean_planned_cost", s.mean_planned_cost},
                 {"t_delta_zero_fraction", s.t_delta_zero_fraction}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace pdvrp
