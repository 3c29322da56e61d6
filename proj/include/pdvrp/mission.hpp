#pragma once

// Execution of planned routes: an authorization ledger that lets only one
// robot perform each task, and a point-mass playback that yields the cost
// actually driven and a timeline per robot.

#include <iosfwd>
#include <optional>
#include <vector>

#include "pdvrp/evaluate.hpp"
#include "pdvrp/instance.hpp"

namespace pdvrp {

class AuthLedger {
 public:
  enum class State { Unclaimed, Granted, Done };

  explicit AuthLedger(int num_tasks);

  // First requester wins; later requesters are denied. Throws
  // std::out_of_range on an unknown task.
  bool authorize(int robot, int task);
  void complete(int robot, int task);

  State state(int task) const;
  // Robot holding the grant, if any.
  std::optional<int> holder(int task) const;
  int num_tasks() const { return static_cast<int>(state_.size()); }

 private:
  void check(int task) const;
  std::vector<State> state_;
  std::vector<int> holder_;
};

struct TimelineEvent {
  int robot = 0;
  int request = -1;  // -1 for the final stop
  double arrival = 0.0;
  double departure = 0.0;
};

struct ExecutionReport {
  double actuated_cost = 0.0;
  std::vector<double> robot_cost;
  std::vector<std::vector<TimelineEvent>> timeline;  // per robot
  std::vector<std::vector<Point>> polyline;          // per robot, start first
  std::vector<int> performed_by;                     // per request, -1 if nobody
  std::vector<int> denied;                           // per robot: requests skipped
  double makespan = 0.0;

  bool all_served() const;
};

// Plays the routes back in simulated time. A robot asks for a pickup when it
// is ready to head there; a grant covers the paired delivery too, since only
// the robot holding the goods can drop them. Denied pairs are skipped and the
// robot drives straight to its next granted stop. Requests are processed in
// time order, ties by robot id. Throws std::invalid_argument on routes that
// break pairing or precedence.
ExecutionReport playback(const Instance& instance, const std::vector<Route>& routes);

void write_report(std::ostream& out, const Instance& instance, const ExecutionReport& report);

}  // namespace pdvrp
