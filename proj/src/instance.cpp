#include "pdvrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pdvrp {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

Instance::Instance(std::vector<Vehicle> vehicles, std::vector<Request> requests,
                   std::optional<Point> end_point)
    : vehicles_(std::move(vehicles)), requests_(std::move(requests)), end_point_(end_point) {
  require(!vehicles_.empty(), "instance needs at least one vehicle");
  const int n_req = num_requests();
  require(n_req >= 2 && n_req % 2 == 0, "requests must come in pickup/delivery pairs");
  const int n_pick = num_pickups();
  for (int j = 0; j < n_req; ++j) {
    const Request& r = requests_[j];
    const std::string tag = "request " + std::to_string(j) + ": ";
    require(r.id == j, tag + "id must equal its index");
    const bool pickup = j < n_pick;
    require(r.kind == (pickup ? RequestKind::Pickup : RequestKind::Delivery),
            tag + "pickups must precede deliveries");
    require(r.pair_id == (pickup ? j + n_pick : j - n_pick), tag + "pair_id mismatch");
    require(pickup ? r.demand > 0.0 : r.demand < 0.0, tag + "demand sign");
    require(r.service_time >= 0.0 && std::isfinite(r.service_time), tag + "service time");
    require(std::isfinite(r.position.x) && std::isfinite(r.position.y), tag + "position");
  }
  for (int j = 0; j < n_pick; ++j) {
    require(requests_[j + n_pick].demand == -requests_[j].demand,
            "paired demands must cancel for pickup " + std::to_string(j));
  }
  for (int i = 0; i < num_vehicles(); ++i) {
    const Vehicle& v = vehicles_[i];
    const std::string tag = "vehicle " + std::to_string(i) + ": ";
    require(v.id == i, tag + "id must equal its index");
    require(v.capacity >= 0.0, tag + "capacity must be non-negative");
    require(v.initial_load >= 0.0 && v.initial_load <= v.capacity,
            tag + "initial load must lie in [0, capacity]");
    require(v.speed > 0.0 && std::isfinite(v.speed), tag + "speed must be positive");
  }
  build_tables();
}

void Instance::build_tables() {
  const int nv = num_vertices();
  const std::size_t size = static_cast<std::size_t>(num_vehicles()) * nv * nv;
  cost_.assign(size, 0.0);
  time_.assign(size, 0.0);
  for (int i = 0; i < num_vehicles(); ++i) {
    for (int from = 0; from < nv; ++from) {
      const auto a = vertex_position(i, from);
      for (int to = 0; to < nv; ++to) {
        const auto b = vertex_position(i, to);
        if (from == to || !a || !b) continue;
        const double len = distance(*a, *b);
        cost_[table_index(i, from, to)] = len;
        time_[table_index(i, from, to)] = len / vehicles_[i].speed;
      }
    }
  }
}

int Instance::vertex_request(int vertex) const {
  return (vertex >= 1 && vertex <= num_requests()) ? vertex - 1 : -1;
}

double Instance::vertex_demand(int vertex) const {
  const int r = vertex_request(vertex);
  return r < 0 ? 0.0 : requests_[r].demand;
}

double Instance::vertex_service(int vertex) const {
  const int r = vertex_request(vertex);
  return r < 0 ? 0.0 : requests_[r].service_time;
}

double Instance::cost(int vehicle, int from, int to) const {
  return cost_[table_index(vehicle, from, to)];
}

double Instance::travel_time(int vehicle, int from, int to) const {
  return time_[table_index(vehicle, from, to)];
}

std::optional<Point> Instance::vertex_position(int vehicle, int vertex) const {
  if (vertex == start_vertex()) return vehicles_[vehicle].start;
  if (vertex == end_vertex()) return end_point_;
  return requests_[vertex_request(vertex)].position;
}

int TaskGraph::local_index(int vertex) const {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), vertex);
  return (it != vertices.end() && *it == vertex) ? static_cast<int>(it - vertices.begin()) : -1;
}

TaskGraph build_task_graph(const Instance& instance, const std::vector<int>& requests) {
  require(instance.num_pickups() >= 1, "instance has no pickup/delivery pairs");
  TaskGraph g;
  g.requests = requests;
  std::sort(g.requests.begin(), g.requests.end());
  require(std::adjacent_find(g.requests.begin(), g.requests.end()) == g.requests.end(),
          "duplicate request in task graph");
  for (int j : g.requests) {
    require(j >= 0 && j < instance.num_requests(), "unknown request " + std::to_string(j));
    const int pair = instance.requests()[j].pair_id;
    require(std::binary_search(g.requests.begin(), g.requests.end(), pair),
            "request " + std::to_string(j) + " is unpaired in the task graph");
  }

  const int s = instance.start_vertex();
  const int sigma = instance.end_vertex();
  g.vertices.push_back(s);
  for (int j : g.requests) g.vertices.push_back(Instance::request_vertex(j));
  g.vertices.push_back(sigma);

  const int nv = g.num_vertices();
  g.out_arcs.assign(nv, {});
  g.in_arcs.assign(nv, {});
  for (int a = 0; a < nv; ++a) {
    if (g.vertices[a] == sigma) continue;
    for (int b = 0; b < nv; ++b) {
      if (a == b || g.vertices[b] == s) continue;
      const int idx = g.num_arcs();
      g.arcs.push_back({g.vertices[a], g.vertices[b]});
      g.out_arcs[a].push_back(idx);
      g.in_arcs[b].push_back(idx);
    }
  }
  return g;
}

TaskGraph build_task_graph(const Instance& instance) {
  std::vector<int> all(instance.num_requests());
  for (int j = 0; j < instance.num_requests(); ++j) all[j] = j;
  return build_task_graph(instance, all);
}

std::string check_task_graph(const Instance& instance, const TaskGraph& g) {
  const int s = instance.start_vertex();
  const int sigma = instance.end_vertex();
  if (g.vertices.size() < 2 || g.vertices.front() != s || g.vertices.back() != sigma)
    return "vertex list must start with s and end with sigma";
  if (!std::is_sorted(g.vertices.begin(), g.vertices.end())) return "vertices not ordered";
  for (int j : g.requests) {
    if (!g.contains_request(instance.requests()[j].pair_id)) return "unpaired request";
  }
  const std::size_t r = g.requests.size();
  if (g.arcs.size() != (r + 1) * (r + 1) - r) return "arc count mismatch";
  for (const Arc& arc : g.arcs) {
    if (arc.from == arc.to) return "self loop";
    if (arc.from == sigma) return "arc leaves sigma";
    if (arc.to == s) return "arc enters s";
    if (g.local_index(arc.from) < 0 || g.local_index(arc.to) < 0) return "dangling arc";
  }
  if (static_cast<int>(g.out_arcs.size()) != g.num_vertices() ||
      static_cast<int>(g.in_arcs.size()) != g.num_vertices())
    return "adjacency size mismatch";
  return {};
}

std::vector<int> local_request_set(const Instance& instance, int vehicle) {
  const double cap = instance.vehicles().at(vehicle).capacity;
  const int np = instance.num_pickups();
  std::vector<int> picks;
  std::vector<int> drops;
  for (int j = 0; j < np; ++j) {
    if (cap >= instance.requests()[j].demand) {
      picks.push_back(j);
      drops.push_back(j + np);
    }
  }
  picks.insert(picks.end(), drops.begin(), drops.end());
  return picks;
}

bool every_request_coverable(const Instance& instance) {
  std::vector<bool> covered(instance.num_requests(), false);
  for (int i = 0; i < instance.num_vehicles(); ++i) {
    for (int j : local_request_set(instance, i)) covered[j] = true;
  }
  return std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

bool is_homogeneous(const Instance& instance) {
  for (int i = 0; i < instance.num_vehicles(); ++i) {
    if (static_cast<int>(local_request_set(instance, i).size()) != instance.num_requests())
      return false;
  }
  return true;
}

Instance generate_random_instance(const GeneratorOptions& o) {
  require(o.n_vehicles >= 1, "need at least one vehicle");
  require(o.n_pickups >= 1, "need at least one pickup");
  require(o.area.x1 > o.area.x0 && o.area.y1 > o.area.y0, "empty area");
  require(o.capacity.lo >= 0.0 && o.capacity.lo <= o.capacity.hi, "inconsistent capacity range");
  require(o.demand.lo > 0.0 && o.demand.lo <= o.demand.hi, "inconsistent demand range");
  require(o.service.lo >= 0.0 && o.service.lo <= o.service.hi, "inconsistent service range");
  require(o.speed > 0.0, "speed must be positive");
  if (!o.heterogeneous) {
    require(o.demand.hi <= o.capacity.lo,
            "homogeneous mode needs demand upper bound <= capacity lower bound");
  } else {
    require(o.demand.lo <= o.capacity.hi, "no vehicle could ever serve any request");
  }

  std::mt19937_64 rng(o.seed);
  auto uniform = [&rng](double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const double xmid = 0.5 * (o.area.x0 + o.area.x1);

  std::vector<Request> requests(2 * o.n_pickups);
  for (int j = 0; j < o.n_pickups; ++j) {
    Request& p = requests[j];
    Request& d = requests[j + o.n_pickups];
    p.id = j;
    p.kind = RequestKind::Pickup;
    p.pair_id = j + o.n_pickups;
    d.id = j + o.n_pickups;
    d.kind = RequestKind::Delivery;
    d.pair_id = j;
    p.position.x = o.split_halves ? uniform(xmid, o.area.x1) : uniform(o.area.x0, o.area.x1);
    p.position.y = uniform(o.area.y0, o.area.y1);
    d.position.x = o.split_halves ? uniform(o.area.x0, xmid) : uniform(o.area.x0, o.area.x1);
    d.position.y = uniform(o.area.y0, o.area.y1);
    p.demand = uniform(o.demand.lo, o.demand.hi);
    d.demand = -p.demand;
    p.service_time = uniform(o.service.lo, o.service.hi);
    d.service_time = uniform(o.service.lo, o.service.hi);
  }

  std::vector<Vehicle> vehicles(o.n_vehicles);
  for (int i = 0; i < o.n_vehicles; ++i) {
    Vehicle& v = vehicles[i];
    v.id = i;
    v.start = {uniform(o.area.x0, o.area.x1), uniform(o.area.y0, o.area.y1)};
    v.speed = o.speed;
  }
  double max_demand = 0.0;
  for (int j = 0; j < o.n_pickups; ++j) max_demand = std::max(max_demand, requests[j].demand);
  // Resample capacities until every pickup fits some vehicle; the last
  // attempt lifts the first vehicle so the loop always terminates.
  for (int attempt = 0;; ++attempt) {
    double best = 0.0;
    for (Vehicle& v : vehicles) {
      v.capacity = uniform(o.capacity.lo, o.capacity.hi);
      best = std::max(best, v.capacity);
    }
    if (best >= max_demand) break;
    if (attempt == 100) {
      vehicles.front().capacity = max_demand;
      break;
    }
  }
  return Instance(std::move(vehicles), std::move(requests));
}

namespace {

using nlohmann::json;

json point_json(const Point& p) { return json::array({p.x, p.y}); }

Point point_from(const json& j) {
  require(j.is_array() && j.size() == 2, "point must be a [x, y] array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string to_json(const Instance& instance) {
  json doc;
  doc["format_version"] = 1;
  doc["end_point"] = instance.end_point() ? point_json(*instance.end_point()) : json("virtual");
  json vehicles = json::array();
  for (const Vehicle& v : instance.vehicles()) {
    vehicles.push_back({{"id", v.id},
                        {"start", point_json(v.start)},
                        {"capacity", v.capacity},
                        {"initial_load", v.initial_load},
                        {"speed", v.speed}});
  }
  json requests = json::array();
  for (const Request& r : instance.requests()) {
    requests.push_back({{"id", r.id},
                        {"kind", r.kind == RequestKind::Pickup ? "pickup" : "delivery"},
                        {"position", point_json(r.position)},
                        {"demand", r.demand},
                        {"service_time", r.service_time},
                        {"pair_id", r.pair_id}});
  }
  doc["vehicles"] = std::move(vehicles);
  doc["requests"] = std::move(requests);
  return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance document is not valid JSON: ") + e.what());
  }
  try {
    require(doc.at("format_version").get<int>() == 1, "unsupported format_version");
    std::optional<Point> end;
    const json& ep = doc.at("end_point");
    if (ep.is_string()) {
      require(ep.get<std::string>() == "virtual", "end_point must be \"virtual\" or [x, y]");
    } else {
      end = point_from(ep);
    }
    std::vector<Vehicle> vehicles;
    for (const json& v : doc.at("vehicles")) {
      Vehicle veh;
      veh.id = v.at("id").get<int>();
      veh.start = point_from(v.at("start"));
      veh.capacity = v.at("capacity").get<double>();
      veh.initial_load = v.value("initial_load", 0.0);
      veh.speed = v.value("speed", 0.2);
      vehicles.push_back(veh);
    }
    std::vector<Request> requests;
    for (const json& r : doc.at("requests")) {
      Request req;
      req.id = r.at("id").get<int>();
      const auto kind = r.at("kind").get<std::string>();
      require(kind == "pickup" || kind == "delivery", "request kind must be pickup|delivery");
      req.kind = kind == "pickup" ? RequestKind::Pickup : RequestKind::Delivery;
      req.position = point_from(r.at("position"));
      req.demand = r.at("demand").get<double>();
      req.service_time = r.at("service_time").get<double>();
      req.pair_id = r.at("pair_id").get<int>();
      requests.push_back(req);
    }
    return Instance(std::move(vehicles), std::move(requests), end);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance document: ") + e.what());
  }
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(instance);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace pdvrp
