#include "pdvrp/route_dp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pdvrp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

VehicleRouteTable::VehicleRouteTable(const Instance& instance, int vehicle,
                                     const std::vector<int>& allowed)
    : instance_(&instance), vehicle_(vehicle), np_(instance.num_pickups()), nr_(instance.num_requests()) {
  if (np_ > 8) throw std::invalid_argument("subset DP limited to |P| <= 8");
  const std::uint32_t full = 1u << nr_;
  dp_.assign(static_cast<std::size_t>(full) * (nr_ + 1), kInf);
  parent_.assign(dp_.size(), -1);
  std::vector<char> ok(nr_, 0);
  for (int r : allowed) ok[r] = 1;
  const Vehicle& veh = instance.vehicles()[vehicle];
  std::vector<double> q(nr_);
  for (int r = 0; r < nr_; ++r) q[r] = instance.requests()[r].demand;
  const int s = instance.start_vertex();

  dp_[index(0, nr_)] = 0.0;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    double load = veh.initial_load;
    for (int r = 0; r < nr_; ++r) {
      if (mask >> r & 1u) load += q[r];
    }
    for (int last = 0; last <= nr_; ++last) {
      const double base = dp_[index(mask, last)];
      if (base == kInf) continue;
      const int from = last == nr_ ? s : last + 1;
      for (int r = 0; r < nr_; ++r) {
        if (!ok[r] || (mask >> r & 1u)) continue;
        if (r >= np_ && !(mask >> (r - np_) & 1u)) continue;
        const double nl = load + q[r];
        if (nl < std::max(0.0, q[r]) - 1e-9 || nl > std::min(veh.capacity, veh.capacity + q[r]) + 1e-9)
          continue;
        const double c = base + instance.cost(vehicle, from, r + 1);
        const std::size_t to = index(mask | (1u << r), r);
        if (c < dp_[to]) {
          dp_[to] = c;
          parent_[to] = static_cast<std::int16_t>(last);
        }
      }
    }
  }

  const std::uint32_t pairs = 1u << np_;
  pair_cost_.assign(pairs, kInf);
  pair_last_.assign(pairs, -1);
  const int e = instance.end_vertex();
  for (std::uint32_t pm = 0; pm < pairs; ++pm) {
    const std::uint32_t mask = pm | (pm << np_);
    for (int last = 0; last <= nr_; ++last) {
      const double base = dp_[index(mask, last)];
      if (base == kInf) continue;
      const double c = base + instance.cost(vehicle, last == nr_ ? s : last + 1, e);
      if (c < pair_cost_[pm]) {
        pair_cost_[pm] = c;
        pair_last_[pm] = static_cast<std::int16_t>(last);
      }
    }
  }
}

std::vector<int> VehicleRouteTable::route(std::uint32_t pair_mask) const {
  if (pair_cost_[pair_mask] == kInf) throw std::invalid_argument("no route serves this pair set");
  std::vector<int> out;
  std::uint32_t mask = pair_mask | (pair_mask << np_);
  int last = pair_last_[pair_mask];
  while (last != nr_) {
    out.push_back(last);
    const int prev = parent_[index(mask, last)];
    mask &= ~(1u << last);
    last = prev;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint32_t VehicleRouteTable::best_superset(std::uint32_t required) const {
  const std::uint32_t pairs = 1u << np_;
  std::uint32_t best = required;
  double best_cost = kInf;
  for (std::uint32_t pm = 0; pm < pairs; ++pm) {
    if ((pm & required) != required) continue;
    if (pair_cost_[pm] < best_cost) {
      best_cost = pair_cost_[pm];
      best = pm;
    }
  }
  if (best_cost == kInf) throw std::invalid_argument("no route serves the required pairs");
  return best;
}

FleetPlan solve_fleet_dp(const Instance& instance) {
  const int n = instance.num_vehicles();
  const int np = instance.num_pickups();
  const std::uint32_t pairs = 1u << np;
  std::vector<VehicleRouteTable> tables;
  // h[i][T]: cheapest route of vehicle i covering at least T, and its set.
  std::vector<std::vector<double>> h(n, std::vector<double>(pairs, kInf));
  std::vector<std::vector<std::uint32_t>> h_set(n, std::vector<std::uint32_t>(pairs, 0));
  for (int i = 0; i < n; ++i) {
    tables.emplace_back(instance, i, local_request_set(instance, i));
    for (std::uint32_t t = 0; t < pairs; ++t) {
      h[i][t] = tables[i].cost(t);
      h_set[i][t] = t;
    }
    for (int b = 0; b < np; ++b) {
      for (std::uint32_t t = pairs; t-- > 0;) {
        if (t >> b & 1u) continue;
        const std::uint32_t sup = t | (1u << b);
        if (h[i][sup] < h[i][t]) {
          h[i][t] = h[i][sup];
          h_set[i][t] = h_set[i][sup];
        }
      }
    }
  }

  std::vector<std::vector<double>> f(n + 1, std::vector<double>(pairs, kInf));
  std::vector<std::vector<std::uint32_t>> pick(n + 1, std::vector<std::uint32_t>(pairs, 0));
  f[0][0] = 0.0;
  for (int i = 0; i < n; ++i) {
    for (std::uint32_t s = 0; s < pairs; ++s) {
      // enumerate subsets t of s, including 0
      for (std::uint32_t t = s;; t = (t - 1) & s) {
        const double prev = f[i][s & ~t];
        if (prev != kInf && h[i][t] != kInf) {
          const double c = prev + h[i][t];
          if (c < f[i + 1][s]) {
            f[i + 1][s] = c;
            pick[i + 1][s] = t;
          }
        }
        if (t == 0) break;
      }
    }
  }
  FleetPlan plan;
  plan.cost = f[n][pairs - 1];
  if (plan.cost == kInf) throw std::invalid_argument("instance has no feasible route set");
  std::uint32_t s = pairs - 1;
  plan.routes.resize(n);
  for (int i = n; i > 0; --i) {
    const std::uint32_t t = pick[i][s];
    plan.routes[i - 1] = {i - 1, tables[i - 1].route(h_set[i - 1][t])};
    s &= ~t;
  }
  return plan;
}

}  // namespace pdvrp
