#include "pdvrp/primal_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pdvrp/bnb.hpp"
#include "pdvrp/route_dp.hpp"

namespace pdvrp {

void validate(const AgentConfig& c) {
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (c.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(c.step_k > 0.0)) throw std::invalid_argument("step constant must be positive");
  if (c.step_switch < 1) throw std::invalid_argument("step switch iteration must be >= 1");
  if (c.penalty < 0.0 || !std::isfinite(c.penalty)) throw std::invalid_argument("penalty must be finite");
}

double step_size(int t, const AgentConfig& c) {
  if (t < 0) throw std::invalid_argument("negative iteration");
  if (t < c.step_switch) return c.step_k / static_cast<double>(t + 1);
  return c.step_k / static_cast<double>(c.step_switch);
}

double default_penalty(const Instance& instance, bool local_sets) {
  double worst = 0.0;
  const TaskGraph full = build_task_graph(instance);
  for (int i = 0; i < instance.num_vehicles(); ++i) {
    const TaskGraph g = local_sets ? build_task_graph(instance, local_request_set(instance, i)) : full;
    double sum = 0.0;
    for (const Arc& a : g.arcs) sum += instance.cost(i, a.from, a.to);
    worst = std::max(worst, sum);
  }
  // degenerate geometry (all points coincide) still needs a positive weight
  return 50.0 * std::max(worst, 1.0);
}

std::vector<double> update_allocation(const std::vector<double>& y, const std::vector<double>& mu_self,
                                      const std::vector<const std::vector<double>*>& mu_neighbors,
                                      double alpha) {
  if (mu_self.size() != y.size()) throw std::invalid_argument("multiplier length mismatch");
  std::vector<double> out = y;
  for (std::size_t j = 0; j < y.size(); ++j) {
    double lap = 0.0;
    for (const std::vector<double>* m : mu_neighbors) {
      if (m == nullptr || m->size() != y.size()) throw std::invalid_argument("missing neighbor multipliers");
      lap += mu_self[j] - (*m)[j];
    }
    out[j] = y[j] - alpha * lap;
  }
  return out;
}

void RunningAverage::add(double weight, const std::vector<double>& y) {
  if (weighted_sum_.empty()) weighted_sum_.assign(y.size(), 0.0);
  if (weighted_sum_.size() != y.size()) throw std::invalid_argument("running average length mismatch");
  for (std::size_t j = 0; j < y.size(); ++j) weighted_sum_[j] += weight * y[j];
  total_weight_ += weight;
}

std::vector<double> RunningAverage::mean() const {
  if (total_weight_ == 0.0) throw std::logic_error("running average over an empty window");
  std::vector<double> out(weighted_sum_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = weighted_sum_[j] / total_weight_;
  return out;
}

std::vector<double> threshold_allocation(const std::vector<double>& y, const std::vector<char>* mask) {
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double cap = (mask != nullptr && !(*mask)[j]) ? 0.0 : 1.0;
    out[j] = std::min(y[j], cap);
  }
  return out;
}

namespace {

std::string agent_name(int i) { return "v" + std::to_string(i); }

}  // namespace

Agent::Agent(const Instance& instance, int id, int num_agents, const AgentConfig& config, double penalty)
    : instance_(&instance), id_(id), config_(config), penalty_(penalty) {
  validate(config);
  if (num_agents < 1) throw std::invalid_argument("need at least one agent");
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  const int nr = instance.num_requests();
  const TaskGraph graph = config.local_sets ? build_task_graph(instance, local_request_set(instance, id))
                                            : build_task_graph(instance);
  mask_.assign(nr, 0);
  for (int r : graph.requests) mask_[r] = 1;

  const double y0 = config.delta / static_cast<double>(num_agents);
  y_.assign(nr, y0);
  mu_.assign(nr, 0.0);

  block_ = add_local_constraints(block_model_, instance, graph, id);
  std::vector<std::vector<Term>> cover(nr);
  if (config.subproblem == SubproblemKind::Relaxation) {
    sub_ = lp_relaxation(block_model_);
    for (int j = 0; j < nr; ++j) {
      for (int a : block_.out_arcs_of_request(j)) cover[j].push_back({block_.x(a), 1.0});
    }
  } else {
    const VehicleRouteTable& tab = table();
    const int np = instance.num_pickups();
    std::vector<Term> convex;
    for (std::uint32_t pm = 0; pm < (1u << np); ++pm) {
      const double c = tab.cost(pm);
      if (!std::isfinite(c)) continue;
      const int col = sub_.add_variable({agent_name(id) + "_w_" + std::to_string(pm), 0.0, kInfinity, c, false});
      convex.push_back({col, 1.0});
      for (int p = 0; p < np; ++p) {
        if (!(pm >> p & 1u)) continue;
        cover[p].push_back({col, 1.0});
        cover[p + np].push_back({col, 1.0});
      }
    }
    sub_.add_row(agent_name(id) + "_convex", std::move(convex), Sense::Equal, 1.0);
  }
  v_col_ = sub_.add_variable({agent_name(id) + "_v", 0.0, kInfinity, penalty, false});
  // Requests outside the local set keep a row with only v in it: the arc sum
  // is empty, so any positive allocation there is paid for at the penalty.
  for (int j = 0; j < nr; ++j) {
    std::vector<Term> terms{{v_col_, 1.0}};
    terms.insert(terms.end(), cover[j].begin(), cover[j].end());
    cover_rows_.push_back(sub_.add_row(agent_name(id) + "_cover_" + std::to_string(j), std::move(terms),
                                       Sense::GreaterEqual, y0));
  }
  lp_ = std::make_unique<SimplexSolver>(sub_);
}

Agent::~Agent() = default;
Agent::Agent(Agent&&) noexcept = default;
Agent& Agent::operator=(Agent&&) noexcept = default;

const SubproblemResult& Agent::solve_subproblem() {
  for (std::size_t j = 0; j < cover_rows_.size(); ++j) lp_->set_row_rhs(cover_rows_[j], y_[j]);
  LpSolution sol = lp_->solve();
  if (sol.status != LpStatus::Optimal) {
    // cannot happen for a consistent block; retry from scratch before giving up
    lp_->reset_basis();
    sol = lp_->solve();
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("agent " + std::to_string(id_) + ": subproblem " + to_string(sol.status));
  }
  last_.objective = sol.objective;
  last_.violation = sol.primal[v_col_];
  last_.lp_iterations = sol.iterations;
  last_.mu.resize(cover_rows_.size());
  const double slack = 1e-7 * std::max(1.0, penalty_);
  for (std::size_t j = 0; j < cover_rows_.size(); ++j) {
    double m = sol.duals[cover_rows_[j]];
    if (m < -slack || m > penalty_ + slack) {
      std::ostringstream msg;
      msg << "agent " << id_ << ": multiplier " << m << " of request " << j << " outside [0, M]";
      throw std::logic_error(msg.str());
    }
    last_.mu[j] = std::clamp(m, 0.0, penalty_);
  }
  mu_ = last_.mu;
  return last_;
}

void Agent::apply_update(const std::vector<const std::vector<double>*>& neighbor_mu) {
  y_ = update_allocation(y_, mu_, neighbor_mu, step_size(t_, config_));
  ++t_;
  if (config_.averaging && t_ > config_.step_switch) average_.add(step_size(t_, config_), y_);
}

std::vector<double> Agent::final_allocation() const {
  if (config_.averaging && !average_.empty()) return average_.mean();
  return y_;
}

FinalRoute Agent::finish(const std::vector<double>& y) {
  const std::vector<double> y_end = threshold_allocation(y, config_.local_sets ? &mask_ : nullptr);
  return solve_final(y_end);
}

const VehicleRouteTable& Agent::table() {
  if (!table_) table_ = std::make_unique<VehicleRouteTable>(*instance_, id_, block_.graph.requests);
  return *table_;
}

FinalRoute Agent::solve_final(const std::vector<double>& y_end) {
  const Instance& inst = *instance_;
  const int np = inst.num_pickups();
  std::uint64_t key = 0;
  for (int j = 0; j < inst.num_requests(); ++j) {
    if (y_end[j] > 0.0) key |= std::uint64_t{1} << j;
  }
  if (config_.final_solver == FinalSolver::SubsetDp) {
    if (auto it = final_cache_.find(key); it != final_cache_.end()) return it->second;
  }

  FinalRoute out;
  out.vehicle = id_;
  std::vector<double> point(block_model_.num_variables(), 0.0);
  if (config_.final_solver == FinalSolver::SubsetDp) {
    // a visited delivery forces its pickup through the pairing rows
    std::uint32_t required = 0;
    for (int p = 0; p < np; ++p) {
      if ((key >> p & 1u) || (key >> (p + np) & 1u)) required |= 1u << p;
    }
    out.requests = table().route(table().best_superset(required));
  } else {
    const LinearModel m = build_final_milp(inst, block_, y_end);
    const MilpSolution sol = solve_milp(m);
    if (sol.status != MilpStatus::Optimal) {
      std::ostringstream dump;
      m.write_lp_format(dump);
      throw std::logic_error("agent " + std::to_string(id_) + ": final problem " + to_string(sol.status) +
                             "\n" + dump.str());
    }
    out.requests = extract_route(block_, sol.x);
  }
  route_to_point(inst, block_, out.requests, point);
  const int na = block_.graph.num_arcs();
  const int nv = block_.graph.num_vertices();
  out.x.assign(point.begin() + block_.x_begin, point.begin() + block_.x_begin + na);
  out.b.assign(point.begin() + block_.b_begin, point.begin() + block_.b_begin + nv);
  out.q.assign(point.begin() + block_.q_begin, point.begin() + block_.q_begin + nv);
  out.cost = route_cost(inst, {id_, out.requests});
  if (config_.final_solver == FinalSolver::SubsetDp) final_cache_.emplace(key, out);
  return out;
}

LinearModel build_final_milp(const Instance& instance, const LocalBlock& block, const std::vector<double>& y_end,
                             std::vector<int>* cover_rows) {
  LinearModel m;
  const LocalBlock b = add_local_constraints(m, instance, block.graph, block.vehicle);
  for (int j = 0; j < instance.num_requests(); ++j) {
    std::vector<Term> terms;
    for (int a : b.out_arcs_of_request(j)) terms.push_back({b.x(a), 1.0});
    const int r = m.add_row(agent_name(block.vehicle) + "_cover_" + std::to_string(j), std::move(terms),
                            Sense::GreaterEqual, y_end[j]);
    if (cover_rows != nullptr) cover_rows->push_back(r);
  }
  return m;
}

}  // namespace pdvrp
