#pragma once

// Pickup-and-delivery problem data: vehicles, paired requests, geometry and
// the task graph of admissible arcs.
//
// Vertex numbering used throughout the library:
//   0            start vertex s
//   1 .. |R|     request j is vertex j + 1
//   |R| + 1      end vertex sigma
// Requests are stored pickups first (0 .. P-1), deliveries after (P .. 2P-1);
// pickup j pairs with delivery j + P.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdvrp {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

enum class RequestKind { Pickup, Delivery };

struct Request {
  int id = 0;
  RequestKind kind = RequestKind::Pickup;
  Point position;
  double demand = 0.0;        // > 0 for pickups, < 0 for deliveries
  double service_time = 0.0;  // seconds
  int pair_id = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Vehicle {
  int id = 0;
  Point start;
  double capacity = 0.0;
  double initial_load = 0.0;
  double speed = 0.2;  // m/s

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

class Instance {
 public:
  Instance() = default;

  // Validates every invariant and builds the derived travel tables.
  // Throws std::invalid_argument on malformed data.
  // `end_point` == nullopt means the end vertex is virtual: arcs into it are
  // free and take no time.
  Instance(std::vector<Vehicle> vehicles, std::vector<Request> requests,
           std::optional<Point> end_point = std::nullopt);

  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Request>& requests() const { return requests_; }
  const std::optional<Point>& end_point() const { return end_point_; }
  bool virtual_end() const { return !end_point_.has_value(); }

  int num_vehicles() const { return static_cast<int>(vehicles_.size()); }
  int num_requests() const { return static_cast<int>(requests_.size()); }
  int num_pickups() const { return num_requests() / 2; }
  int num_vertices() const { return num_requests() + 2; }

  int start_vertex() const { return 0; }
  int end_vertex() const { return num_requests() + 1; }
  static int request_vertex(int request) { return request + 1; }
  int vertex_request(int vertex) const;  // -1 for s and sigma

  // Demand q and service time d of a vertex (zero at s and sigma).
  double vertex_demand(int vertex) const;
  double vertex_service(int vertex) const;

  // Arc cost c_i^{jk} (meters) and travel time t_i^{jk} (seconds).
  double cost(int vehicle, int from, int to) const;
  double travel_time(int vehicle, int from, int to) const;

  // Location of a vertex for a given vehicle; nullopt for a virtual end.
  std::optional<Point> vertex_position(int vehicle, int vertex) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.vehicles_ == b.vehicles_ && a.requests_ == b.requests_ &&
           a.end_point_ == b.end_point_;
  }

 private:
  void build_tables();
  std::size_t table_index(int vehicle, int from, int to) const {
    const auto v = static_cast<std::size_t>(num_vertices());
    return (static_cast<std::size_t>(vehicle) * v + static_cast<std::size_t>(from)) * v +
           static_cast<std::size_t>(to);
  }

  std::vector<Vehicle> vehicles_;
  std::vector<Request> requests_;
  std::optional<Point> end_point_;
  std::vector<double> cost_;
  std::vector<double> time_;
};

struct Arc {
  int from = 0;
  int to = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Graph of admissible arcs over {s, sigma} and a subset of requests.
// Vertices are global vertex ids ordered s, requests ascending, sigma.
struct TaskGraph {
  std::vector<int> requests;  // request ids covered, ascending
  std::vector<int> vertices;
  std::vector<Arc> arcs;
  // out_arcs[p] / in_arcs[p]: arc indices leaving / entering vertices[p]
  std::vector<std::vector<int>> out_arcs;
  std::vector<std::vector<int>> in_arcs;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_arcs() const { return static_cast<int>(arcs.size()); }
  // Position of a global vertex in `vertices`, or -1.
  int local_index(int vertex) const;
  bool contains_request(int request) const { return local_index(request + 1) >= 0; }
};

// Full graph over every request. Throws std::invalid_argument when the
// instance has no pickups or unpaired requests.
TaskGraph build_task_graph(const Instance& instance);

// Local graph restricted to `requests` (must be closed under pairing).
TaskGraph build_task_graph(const Instance& instance, const std::vector<int>& requests);

// Checks the structural invariants of a task graph; returns a description of
// the first violation or an empty string.
std::string check_task_graph(const Instance& instance, const TaskGraph& graph);

// Largest set of requests vehicle i can serve: pickups with q^j <= C_i together
// with their deliveries.
std::vector<int> local_request_set(const Instance& instance, int vehicle);

// True when every request belongs to at least one local set.
bool every_request_coverable(const Instance& instance);

// True when every vehicle can serve every request (C_i >= max q^j).
bool is_homogeneous(const Instance& instance);

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct GeneratorOptions {
  std::uint64_t seed = 1;
  int n_vehicles = 2;
  int n_pickups = 2;
  Rect area{0.0, 0.0, 10.0, 10.0};
  Interval capacity{4.0, 6.0};
  Interval demand{1.0, 3.0};
  Interval service{3.0, 5.0};
  double speed = 0.2;
  // Pickups in the right half of the area, deliveries in the left half.
  bool split_halves = true;
  // Heterogeneous mode lets capacities fall below the largest demand; the
  // generator resamples until every request is coverable.
  bool heterogeneous = false;
};

// Deterministic for a fixed options value. Throws std::invalid_argument on
// inconsistent options.
Instance generate_random_instance(const GeneratorOptions& options);

// Structured-text instance document (JSON, `format_version` 1). Derived
// tables are never stored; they are rebuilt on load.
std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace pdvrp
