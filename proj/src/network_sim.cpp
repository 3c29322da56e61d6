#include "pdvrp/network_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace pdvrp {

const char* to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Complete: return "complete";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::RandomConnected: return "random";
  }
  return "?";
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "complete") return GraphKind::Complete;
  if (name == "cycle") return GraphKind::Cycle;
  if (name == "random" || name == "random-connected") return GraphKind::RandomConnected;
  throw std::invalid_argument("unknown graph kind '" + name + "'");
}

bool CommGraph::connected() const {
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : neighbors[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

CommGraph graph_from_edges(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  CommGraph g;
  g.n = n;
  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop in communication graph");
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.neighbors.assign(n, {});
  for (auto [a, b] : g.edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  return g;
}

CommGraph build_comm_graph(GraphKind kind, int n, std::uint64_t seed, double p) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case GraphKind::Complete:
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
      break;
    case GraphKind::Cycle:
      for (int a = 0; a + 1 < n; ++a) edges.emplace_back(a, a + 1);
      if (n > 2) edges.emplace_back(0, n - 1);
      break;
    case GraphKind::RandomConnected: {
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in (0, 1]");
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (;;) {
        edges.clear();
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b)
            if (u(rng) < p) edges.emplace_back(a, b);
        if (graph_from_edges(n, edges).connected()) break;
      }
      break;
    }
  }
  CommGraph g = graph_from_edges(n, std::move(edges));
  if (!g.connected()) throw std::logic_error("communication graph is not connected");
  return g;
}

void SerialExecutor::run(int count, const std::function<void(int)>& job) {
  for (int k = 0; k < count; ++k) job(k);
}

ThreadExecutor::ThreadExecutor(int workers) : workers_(std::max(1, workers)) {}

void ThreadExecutor::run(int count, const std::function<void(int)>& job) {
  std::vector<std::exception_ptr> errors(count);
  auto body = [&](int w) {
    for (int k = w; k < count; k += workers_) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int used = std::min(workers_, count);
  for (int w = 1; w < used; ++w) pool.emplace_back(body, w);
  if (used > 0) body(0);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Route> to_routes(const std::vector<FinalRoute>& routes) {
  std::vector<Route> out;
  out.reserve(routes.size());
  for (const FinalRoute& r : routes) out.push_back({r.vehicle, r.requests});
  return out;
}

namespace {

void with_agent(int i, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    throw std::runtime_error("agent " + std::to_string(i) + ": " + e.what());
  }
}

}  // namespace

RunResult run_synchronous(const Instance& instance, const CommGraph& graph, const RunOptions& options,
                          Executor& exec) {
  const int n = instance.num_vehicles();
  if (graph.n != n) throw std::invalid_argument("need one graph node per vehicle");
  if (!graph.connected()) throw std::invalid_argument("communication graph is not connected");
  const AgentConfig& cfg = options.agent;
  validate(cfg);
  const int nr = instance.num_requests();

  RunResult res;
  res.penalty = cfg.penalty > 0.0 ? cfg.penalty : default_penalty(instance, cfg.local_sets);
  std::vector<Agent> agents;
  agents.reserve(n);
  for (int i = 0; i < n; ++i) agents.emplace_back(instance, i, n, cfg, res.penalty);
  res.messages_per_round = 2 * static_cast<long>(graph.edges.size());

  auto conservation = [&]() {
    double worst = 0.0;
    for (int j = 0; j < nr; ++j) {
      double s = 0.0;
      for (const Agent& a : agents) s += a.allocation()[j];
      worst = std::max(worst, std::abs(s - cfg.delta));
    }
    res.max_conservation_error = std::max(res.max_conservation_error, worst);
  };

  EvaluationOptions eval;
  eval.local_sets = cfg.local_sets;
  auto probe = [&](int t) {
    std::vector<FinalRoute> routes(n);
    exec.run(n, [&](int i) { with_agent(i, [&] { routes[i] = agents[i].finish(agents[i].final_allocation()); }); });
    const EvaluationReport rep = evaluate_routes(instance, to_routes(routes), eval);
    res.probes.push_back({t, rep.feasible, rep.cost});
  };
  auto probing = [&](int t) {
    return options.probe_every > 0 && t < cfg.iterations && t % options.probe_every == 0;
  };

  std::vector<std::vector<MultiplierMessage>> inbox(n);
  std::vector<TraceRecord> round(n);
  conservation();
  for (int t = 0; t < cfg.iterations; ++t) {
    if (probing(t)) probe(t);
    // phase 1: local solves
    exec.run(n, [&](int i) {
      with_agent(i, [&] {
        TraceRecord& rec = round[i];
        rec.t = t;
        rec.agent = i;
        if (options.keep_trace) rec.y = agents[i].allocation();
        const SubproblemResult& sp = agents[i].solve_subproblem();
        if (options.keep_trace) rec.mu = sp.mu;
        rec.objective = sp.objective;
        rec.violation = sp.violation;
        rec.lp_iterations = sp.lp_iterations;
      });
    });
    // phase 2: delivery, one message per directed edge, by sender id
    for (auto& box : inbox) box.clear();
    for (int i = 0; i < n; ++i) {
      for (int l : graph.neighbors[i]) inbox[l].push_back({i, t, &agents[i].multipliers()});
    }
    for (int i = 0; i < n; ++i) {
      std::sort(inbox[i].begin(), inbox[i].end(),
                [](const MultiplierMessage& a, const MultiplierMessage& b) { return a.sender < b.sender; });
    }
    res.messages += res.messages_per_round;
    // phase 3: allocation updates
    exec.run(n, [&](int i) {
      with_agent(i, [&] {
        const std::vector<MultiplierMessage>& box = inbox[i];
        if (box.size() != graph.neighbors[i].size())
          throw std::logic_error("round " + std::to_string(t) + ": missing neighbor messages");
        std::vector<const std::vector<double>*> mus;
        for (std::size_t k = 0; k < box.size(); ++k) {
          if (box[k].round != t || box[k].sender != graph.neighbors[i][k])
            throw std::logic_error("round " + std::to_string(t) + ": unexpected message");
          mus.push_back(box[k].mu);
        }
        agents[i].apply_update(mus);
      });
    });
    for (const TraceRecord& rec : round) {
      res.lp_iterations += rec.lp_iterations;
      if (options.keep_trace) res.trace.push_back(rec);
    }
    conservation();
  }

  res.routes.resize(n);
  res.final_allocation.resize(n);
  exec.run(n, [&](int i) {
    with_agent(i, [&] {
      res.final_allocation[i] = agents[i].final_allocation();
      res.routes[i] = agents[i].finish(res.final_allocation[i]);
    });
  });
  if (options.probe_every > 0) {
    const EvaluationReport rep = evaluate_routes(instance, to_routes(res.routes), eval);
    res.probes.push_back({cfg.iterations, rep.feasible, rep.cost});
  }
  return res;
}

int empirical_t_delta(const std::vector<Probe>& probes, int iterations) {
  if (probes.empty()) throw std::invalid_argument("no probes recorded");
  int t_delta = iterations + 1;
  for (auto it = probes.rbegin(); it != probes.rend(); ++it) {
    if (!it->feasible) break;
    t_delta = it->t;
  }
  return t_delta;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& r : trace) {
    nlohmann::json j{{"t", r.t},
                     {"agent", r.agent},
                     {"y", r.y},
                     {"mu", r.mu},
                     {"objective", r.objective},
                     {"violation", r.violation},
                     {"lp_iterations", r.lp_iterations}};
    out << j.dump() << '\n';
  }
}

}  // namespace pdvrp
