#pragma once

// Communication graphs and barrier-synchronized execution of the agents:
// every round all agents solve, then all multiplier messages are delivered,
// then all agents update.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pdvrp/evaluate.hpp"
#include "pdvrp/instance.hpp"
#include "pdvrp/primal_decomp.hpp"

namespace pdvrp {

enum class GraphKind { Complete, Cycle, RandomConnected };

const char* to_string(GraphKind kind);
GraphKind parse_graph_kind(const std::string& name);

struct CommGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<std::vector<int>> neighbors;  // ascending

  bool connected() const;
};

// Random graphs are Erdos-Renyi with edge probability `edge_probability`,
// redrawn from the same stream until connected.
CommGraph build_comm_graph(GraphKind kind, int n, std::uint64_t seed = 0, double edge_probability = 0.3);

CommGraph graph_from_edges(int n, std::vector<std::pair<int, int>> edges);

// Runs job(k) for k in [0, count). Implementations must finish every job
// before returning and rethrow the first failure (lowest k).
class Executor {
 public:
  virtual ~Executor() = default;
  virtual void run(int count, const std::function<void(int)>& job) = 0;
  virtual int workers() const = 0;
};

class SerialExecutor final : public Executor {
 public:
  void run(int count, const std::function<void(int)>& job) override;
  int workers() const override { return 1; }
};

class ThreadExecutor final : public Executor {
 public:
  explicit ThreadExecutor(int workers);
  void run(int count, const std::function<void(int)>& job) override;
  int workers() const override { return workers_; }

 private:
  int workers_;
};

struct MultiplierMessage {
  int sender = 0;
  int round = 0;
  const std::vector<double>* mu = nullptr;
};

struct TraceRecord {
  int t = 0;
  int agent = 0;
  std::vector<double> y;   // allocation used by the round-t subproblem
  std::vector<double> mu;
  double objective = 0.0;
  double violation = 0.0;
  int lp_iterations = 0;
};

struct Probe {
  int t = 0;
  bool feasible = false;
  double cost = 0.0;
};

struct RunOptions {
  AgentConfig agent;
  // Probe the would-be final solution every this many rounds (0: never).
  // Round 0 and the final round are always probed when enabled.
  int probe_every = 0;
  bool keep_trace = true;
};

struct RunResult {
  std::vector<TraceRecord> trace;  // ordered by (t, agent)
  std::vector<std::vector<double>> final_allocation;
  std::vector<FinalRoute> routes;
  std::vector<Probe> probes;
  double penalty = 0.0;
  long messages = 0;
  long messages_per_round = 0;
  double max_conservation_error = 0.0;  // max over t of |sum_i y_i^t - delta|
  long lp_iterations = 0;
};

std::vector<Route> to_routes(const std::vector<FinalRoute>& routes);

RunResult run_synchronous(const Instance& instance, const CommGraph& graph, const RunOptions& options,
                          Executor& executor);

// min t over probes such that every probe from t on is feasible; T_f + 1
// when the last probe is infeasible.
int empirical_t_delta(const std::vector<Probe>& probes, int iterations);

// One JSON object per line: t, agent, y, mu, objective, violation.
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace pdvrp
