// Command-line front end: instance generation, centralized and distributed
// solves, Monte Carlo sweeps and route checking.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdvrp/bnb.hpp"
#include "pdvrp/evaluate.hpp"
#include "pdvrp/formulation.hpp"
#include "pdvrp/harness.hpp"
#include "pdvrp/mission.hpp"
#include "pdvrp/network_sim.hpp"
#include "pdvrp/route_dp.hpp"

using namespace pdvrp;
using nlohmann::json;

namespace {

struct InstanceArgs {
  std::string path;
  std::uint64_t seed = 1;
  int vehicles = 3;
  int pickups = 3;
  std::vector<double> area{0.0, 0.0, 10.0, 10.0};
  bool heterogeneous = false;

  void add(CLI::App* app) {
    app->add_option("--instance", path, "Instance file (overrides the generator flags)");
    app->add_option("--seed", seed, "Generator seed");
    app->add_option("--vehicles", vehicles, "Number of vehicles")->check(CLI::PositiveNumber);
    app->add_option("--pickups", pickups, "Number of pickup/delivery pairs")->check(CLI::PositiveNumber);
    app->add_option("--area", area, "Area as x0 y0 x1 y1")->expected(4);
    app->add_flag("--heterogeneous", heterogeneous, "Capacities may fall below some demands");
  }

  TrialConfig trial() const {
    TrialConfig c;
    c.seed = seed;
    c.vehicles = vehicles;
    c.pickups = pickups;
    c.heterogeneous = heterogeneous;
    c.area = {area[0], area[1], area[2], area[3]};
    return c;
  }

  Instance load() const { return path.empty() ? make_trial_instance(trial()) : load_instance(path); }
};

struct AlgoArgs {
  double delta = 0.9;
  int iterations = 250;
  double penalty = 0.0;
  std::string graph = "complete";
  bool averaging = true;
  int probe_every = 0;
  std::string subproblem = "hull";
  std::string final_solver = "dp";

  void add(CLI::App* app) {
    app->add_option("--delta", delta, "Coupling restriction delta in (0,1)");
    app->add_option("--iterations", iterations, "Number of rounds T_f");
    app->add_option("--penalty", penalty, "Penalty weight M (0: automatic)");
    app->add_option("--graph", graph, "complete | cycle | random");
    app->add_option("--averaging", averaging, "Threshold the running average (true) or the last iterate");
    app->add_option("--probe-every", probe_every, "Probe the would-be solution every k rounds (0: off)");
    app->add_option("--subproblem", subproblem, "hull | relaxation");
    app->add_option("--final-solver", final_solver, "dp | bnb");
  }

  RunOptions options() const {
    RunOptions o;
    o.agent.delta = delta;
    o.agent.iterations = iterations;
    o.agent.penalty = penalty;
    o.agent.averaging = averaging;
    if (subproblem == "relaxation")
      o.agent.subproblem = SubproblemKind::Relaxation;
    else if (subproblem != "hull")
      throw std::invalid_argument("unknown subproblem '" + subproblem + "'");
    if (final_solver == "bnb")
      o.agent.final_solver = FinalSolver::BranchAndBound;
    else if (final_solver != "dp")
      throw std::invalid_argument("unknown final solver '" + final_solver + "'");
    o.probe_every = probe_every;
    return o;
  }
};

json routes_json(const std::vector<Route>& routes) {
  json j = json::array();
  for (const Route& r : routes) j.push_back({{"vehicle", r.vehicle}, {"requests", r.requests}});
  return j;
}

std::vector<Route> routes_from_json(const json& j) {
  std::vector<Route> out;
  const json& arr = j.contains("routes") ? j.at("routes") : j;
  for (const json& r : arr) out.push_back({r.at("vehicle").get<int>(), r.at("requests").get<std::vector<int>>()});
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void print_report(const EvaluationReport& rep) {
  std::cerr << (rep.feasible ? "feasible" : "INFEASIBLE") << ", cost " << rep.cost << '\n';
  for (const std::string& v : rep.violations) std::cerr << "  " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pickup-and-delivery routing by distributed primal decomposition"};
  app.require_subcommand(1);
  int exit_code = 0;

  // gen
  InstanceArgs gen_args;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a random instance");
  gen_args.add(gen);
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->callback([&] {
    std::string text = to_json(gen_args.load());
    emit(gen_out, text + "\n");
  });

  // solve-central
  InstanceArgs central_args;
  std::string central_solver = "dp";
  std::string central_out, lp_out;
  long node_limit = 200000;
  CLI::App* central = app.add_subcommand("solve-central", "Exact centralized solve");
  central_args.add(central);
  central->add_option("--solver", central_solver, "dp | bnb");
  central->add_option("--node-limit", node_limit, "Branch-and-bound node limit");
  central->add_option("--out", central_out, "Routes file (default stdout)");
  central->add_option("--export-lp", lp_out, "Also write the centralized MILP in LP format for an external solver");
  central->callback([&] {
    const Instance inst = central_args.load();
    if (!lp_out.empty()) {
      std::ofstream f(lp_out);
      if (!f) throw std::runtime_error("cannot write " + lp_out);
      build_centralized_milp(inst).model.write_lp_format(f);
    }
    std::vector<Route> routes;
    json j;
    if (central_solver == "bnb") {
      const CentralizedModel cm = build_centralized_milp(inst);
      MilpOptions mo;
      mo.node_limit = node_limit;
      const MilpSolution sol = solve_milp(cm.model, mo);
      j["status"] = to_string(sol.status);
      j["nodes"] = sol.nodes;
      j["gap"] = sol.gap;
      if (sol.status == MilpStatus::Infeasible) {
        exit_code = 1;
      } else {
        for (const LocalBlock& b : cm.blocks) routes.push_back({b.vehicle, extract_route(b, sol.x)});
      }
    } else if (central_solver == "dp") {
      routes = solve_fleet_dp(inst).routes;
      j["status"] = "optimal";
    } else {
      throw std::invalid_argument("unknown solver '" + central_solver + "'");
    }
    const EvaluationReport rep = evaluate_routes(inst, routes);
    print_report(rep);
    if (!rep.feasible) exit_code = 1;
    j["cost"] = rep.cost;
    j["routes"] = routes_json(routes);
    emit(central_out, j.dump(2) + "\n");
  });

  // solve-distributed
  InstanceArgs dist_args;
  AlgoArgs dist_algo;
  std::string dist_out, trace_out, report_out;
  int workers = 1;
  std::uint64_t graph_seed = 0;
  CLI::App* dist = app.add_subcommand("solve-distributed", "Run the distributed algorithm");
  dist_args.add(dist);
  dist_algo.add(dist);
  dist->add_option("--graph-seed", graph_seed, "Seed of the random communication graph (0: --seed)");
  dist->add_option("--workers", workers, "Threads used for the agents");
  dist->add_option("--out", dist_out, "Routes file (default stdout)");
  dist->add_option("--trace", trace_out, "Per-round trace, one JSON object per line");
  dist->add_option("--report", report_out, "Playback report");
  dist->callback([&] {
    const Instance inst = dist_args.load();
    RunOptions opt = dist_algo.options();
    opt.agent.local_sets = !is_homogeneous(inst);
    opt.keep_trace = !trace_out.empty();
    const CommGraph g = build_comm_graph(parse_graph_kind(dist_algo.graph), inst.num_vehicles(),
                                         graph_seed ? graph_seed : dist_args.seed);
    std::unique_ptr<Executor> exec;
    if (workers > 1)
      exec = std::make_unique<ThreadExecutor>(workers);
    else
      exec = std::make_unique<SerialExecutor>();
    const RunResult rr = run_synchronous(inst, g, opt, *exec);
    const std::vector<Route> routes = to_routes(rr.routes);
    const EvaluationReport rep = evaluate_routes(inst, routes);
    print_report(rep);
    if (!rep.feasible) exit_code = 1;
    if (rr.max_conservation_error > 1e-9) {
      std::cerr << "allocation sum drifted by " << rr.max_conservation_error << '\n';
      exit_code = 1;
    }
    json j;
    j["cost"] = rep.cost;
    j["feasible"] = rep.feasible;
    j["penalty"] = rr.penalty;
    j["messages"] = rr.messages;
    j["routes"] = routes_json(routes);
    j["final_allocation"] = rr.final_allocation;
    if (!rr.probes.empty()) j["t_delta"] = empirical_t_delta(rr.probes, opt.agent.iterations);
    if (rep.feasible) {
      const ExecutionReport ex = playback(inst, routes);
      j["actuated_cost"] = ex.actuated_cost;
      if (!report_out.empty()) {
        std::ostringstream s;
        write_report(s, inst, ex);
        emit(report_out, s.str());
      }
    }
    if (!trace_out.empty()) {
      std::ostringstream s;
      write_trace(s, rr.trace);
      emit(trace_out, s.str());
    }
    emit(dist_out, j.dump(2) + "\n");
  });

  // montecarlo
  AlgoArgs mc_algo;
  std::vector<int> mc_vehicles{3, 5, 10};
  std::vector<int> mc_pickups{5};
  std::vector<double> mc_deltas;
  int trials = 20;
  std::uint64_t first_seed = 1;
  int mc_workers = 1;
  bool mc_het = false;
  std::string mc_out, mc_summary, mc_baseline = "dp";
  CLI::App* mc = app.add_subcommand("montecarlo", "Sweep trials and export results");
  mc_algo.add(mc);
  mc->add_option("--vehicles", mc_vehicles, "Fleet sizes")->delimiter(',');
  mc->add_option("--pickups", mc_pickups, "Pair counts")->delimiter(',');
  mc->add_option("--deltas", mc_deltas, "Delta values (default: --delta)")->delimiter(',');
  mc->add_option("--trials", trials, "Trials per cell");
  mc->add_option("--seed", first_seed, "First seed in every cell");
  mc->add_option("--workers", mc_workers, "Trials run in parallel");
  mc->add_option("--baseline", mc_baseline, "dp | bnb");
  mc->add_flag("--heterogeneous", mc_het, "Heterogeneous fleets");
  mc->add_option("--out", mc_out, "Per-trial CSV (default stdout)");
  mc->add_option("--summary", mc_summary, "Per-cell aggregates as JSON");
  mc->callback([&] {
    Sweep s;
    s.vehicles = mc_vehicles;
    s.pickups = mc_pickups;
    s.deltas = mc_deltas.empty() ? std::vector<double>{mc_algo.delta} : mc_deltas;
    s.trials = trials;
    s.first_seed = first_seed;
    s.base.run = mc_algo.options();
    s.base.graph = parse_graph_kind(mc_algo.graph);
    s.base.heterogeneous = mc_het;
    s.base.workers = mc_workers;
    s.base.baseline = mc_baseline == "bnb" ? Baseline::BranchAndBound : Baseline::SubsetDp;
    const MonteCarloResult res = run_montecarlo(s);
    std::ostringstream csv;
    write_csv(csv, res.trials);
    emit(mc_out, csv.str());
    if (!mc_summary.empty()) {
      std::ostringstream js;
      write_summary_json(js, res.cells);
      emit(mc_summary, js.str());
    }
    for (const CellSummary& c : res.cells) {
      std::cerr << "N=" << c.vehicles << " |P|=" << c.pickups << " delta=" << c.delta << ": feasible "
                << c.feasible << "/" << c.trials << ", mean planned error " << c.mean_planned_error
                << ", mean actuated error " << c.mean_actuated_error << '\n';
    }
    for (const TrialResult& t : res.trials) {
      if (!t.feasible) {
        std::cerr << "seed " << t.seed << " N=" << t.vehicles << " |P|=" << t.pickups << ": " << t.failure << '\n';
        exit_code = 1;
      }
    }
  });

  // evaluate
  std::string eval_instance, eval_routes;
  CLI::App* ev = app.add_subcommand("evaluate", "Check routes against every constraint");
  ev->add_option("--instance", eval_instance, "Instance file")->required();
  ev->add_option("--routes", eval_routes, "Routes file (output of the solve commands)")->required();
  ev->callback([&] {
    const Instance inst = load_instance(eval_instance);
    std::ifstream f(eval_routes);
    if (!f) throw std::runtime_error("cannot read " + eval_routes);
    const EvaluationReport rep = evaluate_routes(inst, routes_from_json(json::parse(f)));
    print_report(rep);
    if (!rep.feasible) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
