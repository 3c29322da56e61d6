#include "pdvrp/formulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pdvrp {

namespace {

std::string vertex_label(const Instance& instance, int vertex) {
  if (vertex == instance.start_vertex()) return "s";
  if (vertex == instance.end_vertex()) return "e";
  const int r = instance.vertex_request(vertex);
  const int p = instance.num_pickups();
  return r < p ? "P" + std::to_string(r + 1) : "D" + std::to_string(r - p + 1);
}

const std::vector<int> kNoArcs;

}  // namespace

double time_upper_bound(const Instance& instance, const TaskGraph& graph, int vehicle) {
  double total = 0.0;
  for (const Arc& a : graph.arcs) total += instance.travel_time(vehicle, a.from, a.to);
  for (int v : graph.vertices) total += instance.vertex_service(v);
  return total;
}

double time_upper_bound(const Instance& instance, int vehicle) {
  return time_upper_bound(instance, build_task_graph(instance), vehicle);
}

BigMData compute_big_m(const Instance& instance, const TaskGraph& graph, int vehicle) {
  BigMData m;
  m.b_bar = time_upper_bound(instance, graph, vehicle);
  const double cap = instance.vehicles()[vehicle].capacity;
  for (int v : graph.vertices) {
    const double q = instance.vertex_demand(v);
    m.q_lo.push_back(std::max(0.0, q));
    m.q_hi.push_back(std::min(cap, cap + q));
  }
  for (const Arc& a : graph.arcs) {
    const int j = graph.local_index(a.from);
    const int k = graph.local_index(a.to);
    const double qk = instance.vertex_demand(a.to);
    m.m_time.push_back(m.b_bar + instance.vertex_service(a.from) +
                       instance.travel_time(vehicle, a.from, a.to));
    m.w_upper.push_back(std::max(0.0, m.q_hi[j] + qk));
    m.w_lower.push_back(std::max(0.0, m.q_hi[k] - qk - m.q_lo[j]));
  }
  return m;
}

const std::vector<int>& LocalBlock::out_arcs_of_request(int request) const {
  const int p = graph.local_index(request + 1);
  return p < 0 ? kNoArcs : graph.out_arcs[p];
}

LocalBlock add_local_constraints(LinearModel& model, const Instance& instance,
                                 const TaskGraph& graph, int vehicle) {
  if (const std::string err = check_task_graph(instance, graph); !err.empty())
    throw std::invalid_argument("task graph: " + err);
  LocalBlock blk;
  blk.vehicle = vehicle;
  blk.graph = graph;
  blk.big_m = compute_big_m(instance, graph, vehicle);
  const BigMData& bm = blk.big_m;
  const Vehicle& veh = instance.vehicles()[vehicle];
  const std::string tag = "v" + std::to_string(vehicle) + "_";
  const int nv = graph.num_vertices();
  const int s_local = 0;
  const int e_local = nv - 1;

  blk.x_begin = model.num_variables();
  for (const Arc& a : graph.arcs) {
    model.add_variable({tag + "x_" + vertex_label(instance, a.from) + "_" + vertex_label(instance, a.to),
                        0.0, 1.0, instance.cost(vehicle, a.from, a.to), true});
  }
  blk.b_begin = model.num_variables();
  for (int v : graph.vertices) {
    model.add_variable({tag + "B_" + vertex_label(instance, v), 0.0, bm.b_bar, 0.0, false});
  }
  blk.q_begin = model.num_variables();
  for (int p = 0; p < nv; ++p) {
    const std::string name = tag + "Q_" + vertex_label(instance, graph.vertices[p]);
    if (p == s_local) {
      model.add_variable({name, veh.initial_load, veh.initial_load, 0.0, false});
    } else {
      model.add_variable({name, bm.q_lo[p], bm.q_hi[p], 0.0, false});
    }
  }

  blk.row_begin = model.num_rows();
  auto arc_sum = [&](const std::vector<int>& arcs, double sign, std::vector<Term>& terms) {
    for (int a : arcs) terms.push_back({blk.x(a), sign});
  };

  {
    std::vector<Term> t;
    arc_sum(graph.out_arcs[s_local], 1.0, t);
    model.add_row(tag + "start", t, Sense::Equal, 1.0);
  }
  {
    std::vector<Term> t;
    arc_sum(graph.in_arcs[e_local], 1.0, t);
    model.add_row(tag + "end", t, Sense::Equal, 1.0);
  }
  for (int p = 1; p < e_local; ++p) {
    std::vector<Term> t;
    arc_sum(graph.in_arcs[p], 1.0, t);
    arc_sum(graph.out_arcs[p], -1.0, t);
    model.add_row(tag + "flow_" + vertex_label(instance, graph.vertices[p]), t, Sense::Equal, 0.0);
  }
  const int np = instance.num_pickups();
  std::vector<std::pair<int, int>> pairs;  // local positions of (pickup, delivery)
  for (int r : graph.requests) {
    if (r >= np) continue;
    pairs.emplace_back(graph.local_index(r + 1), graph.local_index(r + np + 1));
  }
  for (auto [pu, de] : pairs) {
    std::vector<Term> t;
    arc_sum(graph.out_arcs[pu], 1.0, t);
    arc_sum(graph.out_arcs[de], -1.0, t);
    model.add_row(tag + "pair_" + vertex_label(instance, graph.vertices[pu]), t, Sense::Equal, 0.0);
  }
  for (auto [pu, de] : pairs) {
    model.add_row(tag + "prec_" + vertex_label(instance, graph.vertices[pu]),
                  {{blk.b(pu), 1.0}, {blk.b(de), -1.0}}, Sense::LessEqual, 0.0);
  }

  auto arc_tag = [&](const Arc& a) {
    return vertex_label(instance, a.from) + "_" + vertex_label(instance, a.to);
  };
  // B^k - B^j - M x >= d^j + t^{jk} - M
  for (int e = 0; e < graph.num_arcs(); ++e) {
    const Arc& a = graph.arcs[e];
    const int j = graph.local_index(a.from);
    const int k = graph.local_index(a.to);
    const double m = bm.m_time[e];
    const double lag = instance.vertex_service(a.from) + instance.travel_time(vehicle, a.from, a.to);
    model.add_row(tag + "time_" + arc_tag(a), {{blk.b(k), 1.0}, {blk.b(j), -1.0}, {blk.x(e), -m}},
                  Sense::GreaterEqual, lag - m);
  }
  // Q^k - Q^j - W x >= q^k - W
  for (int e = 0; e < graph.num_arcs(); ++e) {
    const Arc& a = graph.arcs[e];
    const int j = graph.local_index(a.from);
    const int k = graph.local_index(a.to);
    const double w = bm.w_upper[e];
    model.add_row(tag + "loadlo_" + arc_tag(a), {{blk.q(k), 1.0}, {blk.q(j), -1.0}, {blk.x(e), -w}},
                  Sense::GreaterEqual, instance.vertex_demand(a.to) - w);
  }
  // Q^k - Q^j + W x <= q^k + W
  for (int e = 0; e < graph.num_arcs(); ++e) {
    const Arc& a = graph.arcs[e];
    const int j = graph.local_index(a.from);
    const int k = graph.local_index(a.to);
    const double w = bm.w_lower[e];
    model.add_row(tag + "loadhi_" + arc_tag(a), {{blk.q(k), 1.0}, {blk.q(j), -1.0}, {blk.x(e), w}},
                  Sense::LessEqual, instance.vertex_demand(a.to) + w);
  }
  blk.row_end = model.num_rows();
  return blk;
}

LocalRowCounts local_row_counts(const LocalBlock& block, const LinearModel& model) {
  LocalRowCounts c;
  const std::string tag = "v" + std::to_string(block.vehicle) + "_";
  for (int r = block.row_begin; r < block.row_end; ++r) {
    const std::string& name = model.row(r).name;
    const std::string kind = name.substr(tag.size(), name.find('_', tag.size()) - tag.size());
    if (kind == "start") ++c.start;
    else if (kind == "end") ++c.end;
    else if (kind == "flow") ++c.flow;
    else if (kind == "pair") ++c.pairing;
    else if (kind == "prec") ++c.precedence;
    else if (kind == "time") ++c.time;
    else if (kind == "loadlo") ++c.load_lower;
    else if (kind == "loadhi") ++c.load_upper;
  }
  return c;
}

std::vector<int> add_coupling_rows(LinearModel& model, const std::vector<LocalBlock>& blocks,
                                   int num_requests, double rhs) {
  std::vector<int> rows;
  for (int j = 0; j < num_requests; ++j) {
    std::vector<Term> t;
    for (const LocalBlock& b : blocks) {
      for (int a : b.out_arcs_of_request(j)) t.push_back({b.x(a), 1.0});
    }
    rows.push_back(model.add_row("cover_" + std::to_string(j), t, Sense::GreaterEqual, rhs));
  }
  return rows;
}

CentralizedModel build_centralized_milp(const Instance& instance) {
  if (!every_request_coverable(instance))
    throw std::invalid_argument("some request cannot be served by any vehicle");
  CentralizedModel cm;
  const bool homogeneous = is_homogeneous(instance);
  for (int i = 0; i < instance.num_vehicles(); ++i) {
    const TaskGraph g = homogeneous ? build_task_graph(instance)
                                    : build_task_graph(instance, local_request_set(instance, i));
    cm.blocks.push_back(add_local_constraints(cm.model, instance, g, i));
  }
  cm.coupling_rows = add_coupling_rows(cm.model, cm.blocks, instance.num_requests(), 1.0);
  return cm;
}

std::vector<int> extract_route(const LocalBlock& block, const std::vector<double>& x) {
  const TaskGraph& g = block.graph;
  const int e_local = g.num_vertices() - 1;
  std::vector<int> route;
  std::vector<char> seen(g.num_vertices(), 0);
  int cur = 0;
  int used = 0;
  for (int a = 0; a < g.num_arcs(); ++a) used += x[block.x(a)] > 0.5;
  int steps = 0;
  while (cur != e_local) {
    int next = -1;
    for (int a : g.out_arcs[cur]) {
      if (x[block.x(a)] > 0.5) {
        if (next >= 0) throw std::runtime_error("route branches");
        next = g.local_index(g.arcs[a].to);
      }
    }
    if (next < 0) throw std::runtime_error("route does not reach the end vertex");
    if (seen[next]) throw std::runtime_error("route revisits a vertex");
    seen[next] = 1;
    ++steps;
    cur = next;
    if (cur != e_local) route.push_back(g.vertices[cur] - 1);
  }
  if (steps != used) throw std::runtime_error("route has arcs off the main path");
  return route;
}

void route_to_point(const Instance& instance, const LocalBlock& block,
                    const std::vector<int>& route, std::vector<double>& x) {
  const TaskGraph& g = block.graph;
  for (int a = 0; a < g.num_arcs(); ++a) x[block.x(a)] = 0.0;
  for (int p = 0; p < g.num_vertices(); ++p) {
    x[block.b(p)] = 0.0;
    x[block.q(p)] = block.big_m.q_lo[p];
  }
  const int i = block.vehicle;
  x[block.q(0)] = instance.vehicles()[i].initial_load;
  std::vector<int> path{instance.start_vertex()};
  for (int r : route) path.push_back(Instance::request_vertex(r));
  path.push_back(instance.end_vertex());
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const int from = path[s], to = path[s + 1];
    const int pf = g.local_index(from), pt = g.local_index(to);
    if (pf < 0 || pt < 0) throw std::invalid_argument("route leaves the task graph");
    int arc = -1;
    for (int a : g.out_arcs[pf]) {
      if (g.arcs[a].to == to) arc = a;
    }
    x[block.x(arc)] = 1.0;
    x[block.b(pt)] =
        x[block.b(pf)] + instance.vertex_service(from) + instance.travel_time(i, from, to);
    x[block.q(pt)] = x[block.q(pf)] + instance.vertex_demand(to);
  }
}

}  // namespace pdvrp
