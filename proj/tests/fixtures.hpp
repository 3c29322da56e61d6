#pragma once

#include <vector>

#include "pdvrp/instance.hpp"

namespace fixtures {

// Two vehicles, two pickup/delivery pairs, physical terminal node. Pair 1
// lies on the upper lane next to vehicle 0, pair 2 on the lower lane next to
// vehicle 1.
inline pdvrp::Instance two_lane_instance() {
  using pdvrp::RequestKind;
  std::vector<pdvrp::Vehicle> v{{0, {0.0, 0.5}, 2.0, 0.0, 0.2}, {1, {0.0, -0.5}, 2.0, 0.0, 0.2}};
  std::vector<pdvrp::Request> r{
      {0, RequestKind::Pickup, {2.0, 1.0}, 1.0, 3.0, 2},
      {1, RequestKind::Pickup, {2.0, -1.0}, 1.0, 4.0, 3},
      {2, RequestKind::Delivery, {4.0, 1.0}, -1.0, 3.5, 0},
      {3, RequestKind::Delivery, {4.0, -1.0}, -1.0, 4.5, 1},
  };
  return pdvrp::Instance(v, r, pdvrp::Point{6.0, 0.0});
}

// One vehicle, one pair, virtual end.
inline pdvrp::Instance single_pair_instance() {
  using pdvrp::RequestKind;
  std::vector<pdvrp::Vehicle> v{{0, {0.0, 0.0}, 3.0, 0.0, 0.2}};
  std::vector<pdvrp::Request> r{
      {0, RequestKind::Pickup, {3.0, 4.0}, 2.0, 3.0, 1},
      {1, RequestKind::Delivery, {3.0, 0.0}, -2.0, 5.0, 0},
  };
  return pdvrp::Instance(v, r);
}

inline pdvrp::Instance random_instance(std::uint64_t seed, int vehicles, int pickups,
                                       bool heterogeneous = false) {
  pdvrp::GeneratorOptions o;
  o.seed = seed;
  o.n_vehicles = vehicles;
  o.n_pickups = pickups;
  o.heterogeneous = heterogeneous;
  if (heterogeneous) {
    o.capacity = {1.0, 4.0};
    o.demand = {1.0, 3.0};
  }
  return pdvrp::generate_random_instance(o);
}

}  // namespace fixtures
