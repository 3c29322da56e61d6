#include "pdvrp/mission.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

#include "json.hpp"

namespace pdvrp {

AuthLedger::AuthLedger(int num_tasks) : state_(num_tasks, State::Unclaimed), holder_(num_tasks, -1) {}

void AuthLedger::check(int task) const {
  if (task < 0 || task >= num_tasks()) throw std::out_of_range("unknown task " + std::to_string(task));
}

bool AuthLedger::authorize(int robot, int task) {
  check(task);
  if (state_[task] != State::Unclaimed) return holder_[task] == robot && state_[task] == State::Granted;
  state_[task] = State::Granted;
  holder_[task] = robot;
  return true;
}

void AuthLedger::complete(int robot, int task) {
  check(task);
  if (state_[task] != State::Granted || holder_[task] != robot)
    throw std::logic_error("task " + std::to_string(task) + " completed without a grant");
  state_[task] = State::Done;
}

AuthLedger::State AuthLedger::state(int task) const {
  check(task);
  return state_[task];
}

std::optional<int> AuthLedger::holder(int task) const {
  check(task);
  if (holder_[task] < 0) return std::nullopt;
  return holder_[task];
}

bool ExecutionReport::all_served() const {
  return std::all_of(performed_by.begin(), performed_by.end(), [](int r) { return r >= 0; });
}

namespace {

void check_route(const Instance& inst, const Route& route) {
  const int np = inst.num_pickups();
  std::vector<char> seen(inst.num_requests(), 0);
  for (int r : route.requests) {
    if (r < 0 || r >= inst.num_requests()) throw std::invalid_argument("route names an unknown request");
    if (seen[r]) throw std::invalid_argument("route visits a request twice");
    if (r >= np && !seen[r - np]) throw std::invalid_argument("delivery before its pickup");
    seen[r] = 1;
  }
  for (int p = 0; p < np; ++p) {
    if (seen[p] != seen[p + np]) throw std::invalid_argument("pickup without its delivery");
  }
}

}  // namespace

ExecutionReport playback(const Instance& inst, const std::vector<Route>& routes) {
  const int n = inst.num_vehicles();
  const int np = inst.num_pickups();
  if (static_cast<int>(routes.size()) != n) throw std::invalid_argument("need one route per vehicle");
  for (const Route& r : routes) check_route(inst, r);

  ExecutionReport rep;
  rep.robot_cost.assign(n, 0.0);
  rep.timeline.resize(n);
  rep.polyline.resize(n);
  rep.denied.assign(n, 0);
  rep.performed_by.assign(inst.num_requests(), -1);

  AuthLedger ledger(np);
  std::vector<std::size_t> next(n, 0);
  std::vector<int> at(n, inst.start_vertex());
  std::vector<std::vector<char>> skip(n, std::vector<char>(inst.num_requests(), 0));
  for (int i = 0; i < n; ++i) rep.polyline[i].push_back(inst.vehicles()[i].start);

  using Event = std::tuple<double, int>;  // ready time, robot
  std::priority_queue<Event, std::vector<Event>, std::greater<>> ready;
  for (int i = 0; i < n; ++i) ready.emplace(0.0, i);

  while (!ready.empty()) {
    const auto [t, i] = ready.top();
    ready.pop();
    const std::vector<int>& seq = routes[i].requests;
    int target = -1;
    while (next[i] < seq.size()) {
      const int r = seq[next[i]++];
      if (skip[i][r]) continue;
      if (r < np && !ledger.authorize(i, r)) {
        skip[i][r + np] = 1;
        ++rep.denied[i];
        continue;
      }
      target = r;
      break;
    }
    const int to = target >= 0 ? Instance::request_vertex(target) : inst.end_vertex();
    const double d = inst.cost(i, at[i], to);
    const double arrival = t + inst.travel_time(i, at[i], to);
    rep.robot_cost[i] += d;
    at[i] = to;
    if (auto pos = inst.vertex_position(i, to)) rep.polyline[i].push_back(*pos);
    if (target < 0) {
      rep.timeline[i].push_back({i, -1, arrival, arrival});
      rep.makespan = std::max(rep.makespan, arrival);
      continue;
    }
    const double departure = arrival + inst.vertex_service(to);
    rep.timeline[i].push_back({i, target, arrival, departure});
    rep.performed_by[target] = i;
    if (target >= np) ledger.complete(i, target - np);
    ready.emplace(departure, i);
  }
  for (double c : rep.robot_cost) rep.actuated_cost += c;
  return rep;
}

void write_report(std::ostream& out, const Instance& inst, const ExecutionReport& rep) {
  nlohmann::json j;
  j["actuated_cost"] = rep.actuated_cost;
  j["makespan"] = rep.makespan;
  j["performed_by"] = rep.performed_by;
  j["robots"] = nlohmann::json::array();
  for (int i = 0; i < inst.num_vehicles(); ++i) {
    nlohmann::json r;
    r["id"] = i;
    r["cost"] = rep.robot_cost[i];
    r["denied"] = rep.denied[i];
    for (const TimelineEvent& e : rep.timeline[i])
      r["timeline"].push_back({{"request", e.request}, {"arrival", e.arrival}, {"departure", e.departure}});
    for (const Point& p : rep.polyline[i]) r["polyline"].push_back({p.x, p.y});
    j["robots"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

}  // namespace pdvrp
