#include "emss/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "emss/common.hpp"
#include "emss/dc.hpp"

namespace emss {

Netlist synthetic_grid(const GridOptions& o) {
  if (o.rows < 2 || o.cols < 2) throw Error("grid needs at least 2x2 nodes");
  if (o.pad_stride < 1) throw Error("pad stride must be >= 1");

  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> pitch_um(5, 20);
  std::uniform_real_distribution<double> cross(2e-7, 1e-6);
  std::uniform_real_distribution<double> load_amps(1e-5, 5e-4);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);

  std::vector<long> xs(o.cols), ys(o.rows);
  xs[0] = 0;
  for (int c = 1; c < o.cols; ++c) xs[c] = xs[c - 1] + pitch_um(rng);
  ys[0] = 0;
  for (int r = 1; r < o.rows; ++r) ys[r] = ys[r - 1] + pitch_um(rng);

  Netlist net;
  std::vector<std::string> node_of(static_cast<std::size_t>(o.rows) * o.cols);
  for (int r = 0; r < o.rows; ++r) {
    for (int c = 0; c < o.cols; ++c) {
      std::string name = "n1_" + std::to_string(xs[c]) + "_" + std::to_string(ys[r]);
      net.add_node(name);
      node_of[static_cast<std::size_t>(r) * o.cols + c] = std::move(name);
    }
  }
  net.add_node(kGroundName);

  const double rho = 2.25e-8;  // only sets resistor scale; analysis re-derives
  auto add_resistor = [&](std::string rname, const std::string& a, const std::string& b,
                          double length_m) {
    double w = cross(rng), h = cross(rng);
    ResistorCard card;
    card.name = std::move(rname);
    card.node_a = a;
    card.node_b = b;
    card.ohms = rho * length_m / (w * h);
    net.resistors.push_back(std::move(card));
  };

  for (int r = 0; r < o.rows; ++r)
    for (int c = 0; c + 1 < o.cols; ++c)
      add_resistor("rh" + std::to_string(r) + "_" + std::to_string(c),
                   node_of[static_cast<std::size_t>(r) * o.cols + c],
                   node_of[static_cast<std::size_t>(r) * o.cols + c + 1],
                   static_cast<double>(xs[c + 1] - xs[c]) * 1e-6);
  for (int r = 0; r + 1 < o.rows; ++r)
    for (int c = 0; c < o.cols; ++c)
      add_resistor("rv" + std::to_string(r) + "_" + std::to_string(c),
                   node_of[static_cast<std::size_t>(r) * o.cols + c],
                   node_of[static_cast<std::size_t>(r + 1) * o.cols + c],
                   static_cast<double>(ys[r + 1] - ys[r]) * 1e-6);

  std::vector<char> is_pad(node_of.size(), 0);
  int pads = 0;
  for (int r = o.pad_stride / 2; r < o.rows; r += o.pad_stride) {
    for (int c = o.pad_stride / 2; c < o.cols; c += o.pad_stride) {
      std::size_t idx = static_cast<std::size_t>(r) * o.cols + c;
      is_pad[idx] = 1;
      SourceCard v;
      v.name = "vp" + std::to_string(r) + "_" + std::to_string(c);
      v.node_a = node_of[idx];
      v.node_b = kGroundName;
      v.value = o.pad_volts;
      net.voltage_sources.push_back(std::move(v));
      ++pads;
    }
  }
  if (pads == 0) {
    SourceCard v;
    v.name = "vp0_0";
    v.node_a = node_of[0];
    v.node_b = kGroundName;
    v.value = o.pad_volts;
    net.voltage_sources.push_back(std::move(v));
    is_pad[0] = 1;
  }

  int loads = 0;
  for (std::size_t idx = 0; idx < node_of.size(); ++idx) {
    if (is_pad[idx]) continue;
    if (unit01(rng) > o.load_probability) continue;
    SourceCard i;
    i.name = "il" + std::to_string(loads++);
    i.node_a = node_of[idx];
    i.node_b = kGroundName;
    i.value = load_amps(rng);
    net.current_sources.push_back(std::move(i));
  }
  if (loads == 0) {
    SourceCard i;
    i.name = "il0";
    i.node_a = node_of.back();
    i.node_b = kGroundName;
    i.value = load_amps(rng);
    net.current_sources.push_back(std::move(i));
  }
  return net;
}

AnalysisUnit random_unit(const RandomUnitOptions& o) {
  if (o.nodes < 2) throw Error("random unit needs at least 2 nodes");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::uniform_real_distribution<double> log_len(std::log(5e-6), std::log(2e-4));
  std::uniform_real_distribution<double> cross(1e-7, 2e-6);

  const double rho = o.rho;

  struct Edge {
    int a, b;
    double l, w, h;
  };
  std::vector<Edge> edges;
  edges.reserve(o.nodes - 1 + o.extra_edges);
  for (int i = 1; i < o.nodes; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.push_back({pick(rng), i, 0, 0, 0});
  }
  std::uniform_int_distribution<int> any(0, o.nodes - 1);
  for (int e = 0; e < o.extra_edges; ++e) {
    int a = any(rng), b = any(rng);
    while (b == a) b = any(rng);
    edges.push_back({a, b, 0, 0, 0});
  }
  for (Edge& e : edges) {
    e.l = std::exp(log_len(rng));
    e.w = cross(rng);
    e.h = cross(rng);
    if (unit01(rng) < 0.5) std::swap(e.a, e.b);
  }
  std::shuffle(edges.begin(), edges.end(), rng);

  AnalysisUnit unit;
  unit.layer = 1;
  unit.graph.nodes.resize(o.nodes);
  for (int i = 0; i < o.nodes; ++i) {
    unit.graph.nodes[i].id = i;
    unit.graph.nodes[i].name = "a" + std::to_string(i);
    unit.graph.nodes[i].layer = 1;
  }
  unit.node_voltage.resize(o.nodes, 0.0);

  if (o.use_dc) {
    Netlist net;
    std::vector<std::string> names(o.nodes);
    for (int i = 0; i < o.nodes; ++i) {
      names[i] = "a" + std::to_string(i);
      net.add_node(names[i]);
    }
    net.add_node(kGroundName);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      ResistorCard r;
      r.name = "r" + std::to_string(k);
      r.node_a = names[edges[k].a];
      r.node_b = names[edges[k].b];
      r.ohms = rho * edges[k].l / (edges[k].w * edges[k].h);
      net.resistors.push_back(std::move(r));
    }
    int pad = any(rng);
    int second = -1;
    SourceCard v;
    v.name = "v0";
    v.node_a = names[pad];
    v.node_b = kGroundName;
    v.value = 1.0;
    net.voltage_sources.push_back(std::move(v));
    if (o.nodes > 3 && unit01(rng) < 0.3) {
      int where = any(rng);
      while (where == pad) where = any(rng);
      second = where;
      SourceCard v2;
      v2.name = "v1";
      v2.node_a = names[where];
      v2.node_b = kGroundName;
      v2.value = 0.95;
      net.voltage_sources.push_back(std::move(v2));
    }
    // Loads go on unpinned nodes only. A load sitting on a pin feeds the
    // source directly and can leave the segments carrying no current at
    // all, which makes the stresses pure rounding noise.
    std::uniform_real_distribution<double> load_amps(1e-5, 2e-3);
    int loads = 0;
    for (int i = 0; i < o.nodes; ++i) {
      if (unit01(rng) >= 0.3) continue;
      if (i == pad || i == second) continue;
      SourceCard s;
      s.name = "i" + std::to_string(i);
      s.node_a = names[i];
      s.node_b = kGroundName;
      s.value = load_amps(rng);
      net.current_sources.push_back(std::move(s));
      ++loads;
    }
    if (loads == 0) {
      int sink = o.nodes - 1;
      while (sink == pad || sink == second) --sink;
      SourceCard s;
      s.name = "iforce";
      s.node_a = names[sink];
      s.node_b = kGroundName;
      s.value = load_amps(rng);
      net.current_sources.push_back(std::move(s));
    }

    DcSolution dc = solve_dc(net);
    for (int i = 0; i < o.nodes; ++i)
      unit.node_voltage[i] = dc.node_voltage[net.node_index(names[i])];
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      Segment seg;
      seg.id = static_cast<int>(k);
      seg.from_node = e.a;
      seg.to_node = e.b;
      seg.length = e.l;
      seg.width = e.w;
      seg.height = e.h;
      seg.current_density = -dc.resistor_current[k] / (e.w * e.h);
      unit.graph.segments.push_back(seg);
      unit.segment_names.push_back("r" + std::to_string(k));
    }
  } else {
    std::uniform_real_distribution<double> volts(0.0, 0.05);
    for (int i = 0; i < o.nodes; ++i) unit.node_voltage[i] = volts(rng);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      Segment seg;
      seg.id = static_cast<int>(k);
      seg.from_node = e.a;
      seg.to_node = e.b;
      seg.length = e.l;
      seg.width = e.w;
      seg.height = e.h;
      seg.current_density =
          (unit.node_voltage[e.b] - unit.node_voltage[e.a]) / (rho * e.l);
      unit.graph.segments.push_back(seg);
      unit.segment_names.push_back("r" + std::to_string(k));
    }
  }
  unit.graph.rebuild_adjacency();
  return unit;
}

PreparedGrid prepare_grid(const GridOptions& options, const MaterialParams& params) {
  Netlist net = synthetic_grid(options);
  NamingRule rule;
  LayerGeometry geo = decode_geometry(net, rule);
  ShortCollapse collapse = collapse_shorts(net);

  PreparedGrid out;
  auto t0 = std::chrono::steady_clock::now();
  DcSolution dc = solve_dc(collapse.reduced);
  auto t1 = std::chrono::steady_clock::now();
  out.dc_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.dc_residual = dc.residual_norm;
  out.units = build_units(net, geo, collapse, dc, params);
  return out;
}

}  // namespace emss
