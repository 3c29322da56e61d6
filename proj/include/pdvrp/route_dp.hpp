#pragma once

// Exact dynamic programs over visited-request subsets. One vehicle: cheapest
// route for every set of pickup/delivery pairs. Fleet: cheapest split of the
// pairs among vehicles. Used as the centralized baseline at sizes where
// branch and bound on the big-M model is too slow, and as a fast exact
// solver for the single-vehicle final problem.

#include <cstdint>
#include <vector>

#include "pdvrp/evaluate.hpp"
#include "pdvrp/instance.hpp"

namespace pdvrp {

class VehicleRouteTable {
 public:
  // Requests outside `allowed` are never visited. Limited to |P| <= 10.
  VehicleRouteTable(const Instance& instance, int vehicle, const std::vector<int>& allowed);

  int vehicle() const { return vehicle_; }
  // Cheapest cost of a route serving exactly the pairs in `pair_mask`
  // (bit p = pair p); infinity when no such route exists.
  double cost(std::uint32_t pair_mask) const { return pair_cost_[pair_mask]; }
  std::vector<int> route(std::uint32_t pair_mask) const;

  // Cheapest route serving at least the pairs in `required`; returns the
  // chosen superset mask.
  std::uint32_t best_superset(std::uint32_t required) const;

 private:
  const Instance* instance_;
  int vehicle_;
  int np_;
  int nr_;
  // dp over (request mask, last request); last == nr_ means still at s.
  std::vector<double> dp_;
  std::vector<std::int16_t> parent_;
  std::vector<double> pair_cost_;
  std::vector<std::int16_t> pair_last_;
  std::size_t index(std::uint32_t mask, int last) const {
    return static_cast<std::size_t>(mask) * static_cast<std::size_t>(nr_ + 1) + static_cast<std::size_t>(last);
  }
};

struct FleetPlan {
  double cost = 0.0;
  std::vector<Route> routes;
};

// Minimum total cost over all route sets that visit every request at least
// once. Vehicles are restricted to their local request sets.
FleetPlan solve_fleet_dp(const Instance& instance);

}  // namespace pdvrp
