#include "emss/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "emss/common.hpp"

namespace emss {
namespace {

struct PatternToken {
  enum Kind { kLiteral, kLayer, kX, kY } kind = kLiteral;
  std::string text;  // for kLiteral
};

struct CompiledPattern {
  bool leading_wildcard = false;
  std::vector<PatternToken> tokens;
  bool is_default = false;
};

CompiledPattern compile_pattern(const std::string& pattern) {
  CompiledPattern out;
  out.is_default = (pattern == kDefaultNodePattern);
  std::string::size_type i = 0;
  if (!pattern.empty() && pattern[0] == '*') {
    out.leading_wildcard = true;
    i = 1;
  }
  bool seen[3] = {false, false, false};
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) {
      out.tokens.push_back({PatternToken::kLiteral, literal});
      literal.clear();
    }
  };
  for (; i < pattern.size(); ++i) {
    if (pattern[i] == '<') {
      auto close = pattern.find('>', i);
      if (close == std::string::npos)
        throw Error("naming pattern has an unterminated '<' placeholder: " + pattern);
      std::string name = pattern.substr(i + 1, close - i - 1);
      PatternToken token;
      if (name == "layer") token.kind = PatternToken::kLayer;
      else if (name == "x") token.kind = PatternToken::kX;
      else if (name == "y") token.kind = PatternToken::kY;
      else throw Error("naming pattern has unknown placeholder <" + name + ">");
      int slot = token.kind == PatternToken::kLayer ? 0 : (token.kind == PatternToken::kX ? 1 : 2);
      if (seen[slot]) throw Error("naming pattern repeats placeholder <" + name + ">");
      seen[slot] = true;
      flush();
      out.tokens.push_back(token);
      i = close;
    } else if (pattern[i] == '*') {
      throw Error("naming pattern allows '*' only as the first character");
    } else {
      literal.push_back(pattern[i]);
    }
  }
  flush();
  if (!(seen[0] && seen[1] && seen[2]))
    throw Error("naming pattern must contain <layer>, <x> and <y>: " + pattern);
  return out;
}

bool parse_int_span(const char* begin, const char* end, const char** next, long long* out) {
  const char* p = begin;
  if (p < end && (*p == '-' || *p == '+')) ++p;
  if (p >= end || !std::isdigit(static_cast<unsigned char>(*p))) return false;
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  if (ec != std::errc()) return false;
  *next = ptr;
  return true;
}

bool match_from(const CompiledPattern& pat, const char* p, const char* end,
                long long v[3]) {
  for (std::size_t t = 0; t < pat.tokens.size(); ++t) {
    const PatternToken& tok = pat.tokens[t];
    if (tok.kind == PatternToken::kLiteral) {
      std::size_t n = tok.text.size();
      if (static_cast<std::size_t>(end - p) < n ||
          std::memcmp(p, tok.text.data(), n) != 0)
        return false;
      p += n;
    } else {
      long long value = 0;
      const char* next = nullptr;
      if (!parse_int_span(p, end, &next, &value)) return false;
      v[tok.kind == PatternToken::kLayer ? 0 : (tok.kind == PatternToken::kX ? 1 : 2)] = value;
      p = next;
    }
  }
  return p == end;
}

bool decode_name(const CompiledPattern& pat, const NamingRule& rule,
                 const std::string& name, NodeGeometry* out) {
  long long v[3] = {0, 0, 0};
  const char* begin = name.data();
  const char* end = begin + name.size();
  bool ok = false;
  if (pat.leading_wildcard) {
    for (const char* p = begin; p <= end && !ok; ++p) ok = match_from(pat, p, end, v);
  } else {
    ok = match_from(pat, begin, end, v);
  }
  if (!ok) return false;
  out->layer = static_cast<int>(v[0]);
  out->x = static_cast<double>(v[1]) * rule.unit;
  out->y = static_cast<double>(v[2]) * rule.unit;
  return true;
}

}  // namespace

LayerGeometry decode_geometry(const Netlist& netlist, const NamingRule& rule) {
  CompiledPattern pattern = compile_pattern(rule.pattern);
  if (!(rule.unit > 0.0) || !is_finite(rule.unit))
    throw Error("naming rule unit must be a positive length in meters");

  LayerGeometry geo;
  geo.resistor_kind.resize(netlist.resistors.size(), ResistorKind::kSegment);
  geo.resistor_length.resize(netlist.resistors.size(), 0.0);
  geo.nodes.reserve(netlist.node_count());

  std::vector<std::string> bad;
  long bad_total = 0;
  // 0 = undecoded, 1 = ok, 2 = failed
  std::vector<uint8_t> state(netlist.node_count(), 0);
  std::vector<NodeGeometry> cache(netlist.node_count());

  auto node_ref = [&](const std::string& name) {
    int idx = netlist.node_index(name);
    if (idx < 0) throw Error("node " + name + " is not registered in the netlist");
    return idx;
  };
  auto decode_index = [&](const std::string& name, bool required) -> int {
    int idx = node_ref(name);
    if (state[idx] == 0) {
      NodeGeometry g;
      state[idx] = decode_name(pattern, rule, name, &g) ? 1 : 2;
      if (state[idx] == 1) cache[idx] = g;
    }
    if (state[idx] == 2 && required) {
      ++bad_total;
      if (bad.size() < 20) bad.push_back(name);
    }
    return state[idx] == 1 ? idx : -1;
  };

  for (std::size_t i = 0; i < netlist.resistors.size(); ++i) {
    const ResistorCard& r = netlist.resistors[i];
    bool grounded = (r.node_a == kGroundName || r.node_b == kGroundName);
    if (grounded) {
      geo.resistor_kind[i] = ResistorKind::kGroundAttached;
      if (r.node_a != kGroundName) decode_index(r.node_a, false);
      if (r.node_b != kGroundName) decode_index(r.node_b, false);
      continue;
    }
    if (r.ohms == 0.0) {
      geo.resistor_kind[i] = ResistorKind::kShort;
      decode_index(r.node_a, false);
      decode_index(r.node_b, false);
      continue;
    }
    int ia = decode_index(r.node_a, true);
    int ib = decode_index(r.node_b, true);
    if (ia < 0 || ib < 0) continue;  // reported below
    const NodeGeometry& ga = cache[ia];
    const NodeGeometry& gb = cache[ib];
    if (ga.layer != gb.layer) {
      geo.resistor_kind[i] = ResistorKind::kVia;
      continue;
    }
    double length = std::abs(ga.x - gb.x) + std::abs(ga.y - gb.y);
    if (length == 0.0) {
      geo.resistor_kind[i] = ResistorKind::kZeroLength;
      continue;
    }
    geo.resistor_kind[i] = ResistorKind::kSegment;
    geo.resistor_length[i] = length;
  }

  if (bad_total > 0) {
    std::ostringstream msg;
    msg << bad_total << " segment endpoint label(s) do not match naming pattern \""
        << rule.pattern << "\":";
    for (const std::string& name : bad) msg << ' ' << name;
    if (bad_total > static_cast<long>(bad.size())) msg << " ...";
    throw Error(msg.str());
  }

  for (std::size_t idx = 0; idx < state.size(); ++idx)
    if (state[idx] == 1) geo.nodes.emplace(netlist.node_names()[idx], cache[idx]);
  return geo;
}

double back_calculate_area(double rho, double length, double ohms) {
  if (!(rho > 0.0) || !(length > 0.0) || !(ohms > 0.0))
    throw Error("area back-calculation needs positive resistivity, length and resistance");
  return rho * length / ohms;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

// old id -> breadth-first discovery index from node 0, or empty when the
// graph is disconnected.
std::vector<int> bfs_permutation(const InterconnectGraph& g) {
  const int n = g.node_count();
  std::vector<int> perm(n, -1);
  std::vector<int> order;
  order.reserve(n);
  order.push_back(0);
  perm[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    for (const AdjacencyEntry* e = g.adj_begin(v); e != g.adj_end(v); ++e) {
      if (perm[e->neighbor] >= 0) continue;
      perm[e->neighbor] = static_cast<int>(order.size());
      order.push_back(e->neighbor);
    }
  }
  if (static_cast<int>(order.size()) != n) perm.clear();
  return perm;
}

void apply_node_permutation(AnalysisUnit& unit, const std::vector<int>& perm) {
  InterconnectGraph& g = unit.graph;
  const int n = g.node_count();
  std::vector<NodeRecord> nodes(n);
  std::vector<double> volts(n);
  for (int old = 0; old < n; ++old) {
    int next = perm[old];
    nodes[next] = std::move(g.nodes[old]);
    nodes[next].id = next;
    volts[next] = unit.node_voltage[old];
  }
  g.nodes = std::move(nodes);
  unit.node_voltage = std::move(volts);
  for (Segment& s : g.segments) {
    s.from_node = perm[s.from_node];
    s.to_node = perm[s.to_node];
  }
}

// Renumber nodes into breadth-first discovery order and sort segments by
// their endpoints so solver traversals touch every array almost
// sequentially. Pure relabeling: names, voltages and per-segment values are
// preserved. The second relabel round makes discovery order and node id
// order coincide exactly on the reordered adjacency.
void relabel_breadth_first(AnalysisUnit& unit) {
  InterconnectGraph& g = unit.graph;
  const int n = g.node_count();
  if (n < 2) return;
  std::vector<int> perm = bfs_permutation(g);
  if (perm.empty()) return;  // disconnected: keep as built
  apply_node_permutation(unit, perm);

  const int m = g.segment_count();
  std::vector<int> by_endpoint(m);
  for (int i = 0; i < m; ++i) by_endpoint[i] = i;
  std::sort(by_endpoint.begin(), by_endpoint.end(), [&](int a, int b) {
    const Segment& sa = g.segments[a];
    const Segment& sb = g.segments[b];
    int ka = std::min(sa.from_node, sa.to_node);
    int kb = std::min(sb.from_node, sb.to_node);
    if (ka != kb) return ka < kb;
    if (sa.from_node != sb.from_node) return sa.from_node < sb.from_node;
    if (sa.to_node != sb.to_node) return sa.to_node < sb.to_node;
    return a < b;
  });
  std::vector<Segment> segs_sorted(m);
  std::vector<std::string> names_sorted(m);
  for (int i = 0; i < m; ++i) {
    segs_sorted[i] = g.segments[by_endpoint[i]];
    segs_sorted[i].id = i;
    names_sorted[i] = std::move(unit.segment_names[by_endpoint[i]]);
  }
  g.segments = std::move(segs_sorted);
  unit.segment_names = std::move(names_sorted);
  g.rebuild_adjacency();

  perm = bfs_permutation(g);
  if (!perm.empty()) apply_node_permutation(unit, perm);
  g.rebuild_adjacency();
}

}  // namespace

UnitSet build_units(const Netlist& netlist, const LayerGeometry& geometry,
                    const ShortCollapse& collapse, const DcSolution& dc,
                    const MaterialParams& params, const UnitBuildOptions& options) {
  if (geometry.resistor_kind.size() != netlist.resistors.size())
    throw Error("geometry classification does not match the netlist");
  if (!(options.aspect_ratio > 0.0) || !is_finite(options.aspect_ratio))
    throw Error("aspect ratio must be positive");
  if (dc.resistor_current.size() != collapse.reduced.resistors.size())
    throw Error("dc solution does not match the collapsed netlist");

  UnitSet out;
  UnitBreakdown& bd = out.breakdown;
  bd.sources = static_cast<long>(netlist.current_sources.size() +
                                 netlist.voltage_sources.size());

  // Map original resistor index -> index in the collapsed netlist (R > 0
  // cards survive in order).
  std::vector<int> reduced_index(netlist.resistors.size(), -1);
  {
    int next = 0;
    for (std::size_t i = 0; i < netlist.resistors.size(); ++i)
      if (netlist.resistors[i].ohms != 0.0) reduced_index[i] = next++;
    if (next != static_cast<int>(collapse.reduced.resistors.size()))
      throw Error("collapsed netlist does not correspond to the original");
  }

  // Segment list with canonical endpoints (as collapsed-netlist node
  // indices); reclassify segments whose endpoints were merged by shorts.
  struct SegRef {
    int resistor = 0;
    int layer = 0;
    int from = 0, to = 0;  // node indices in collapse.reduced
  };
  auto canonical_index = [&](const std::string& name) {
    int idx = collapse.reduced.node_index(collapse.resolve(name));
    if (idx < 0)
      throw Error("node " + name + " missing from the collapsed netlist");
    return idx;
  };
  std::vector<SegRef> segs;
  segs.reserve(netlist.resistors.size());
  for (std::size_t i = 0; i < netlist.resistors.size(); ++i) {
    switch (geometry.resistor_kind[i]) {
      case ResistorKind::kVia: ++bd.vias; continue;
      case ResistorKind::kShort: ++bd.shorts; continue;
      case ResistorKind::kGroundAttached: ++bd.ground_attached; continue;
      case ResistorKind::kZeroLength:
        ++bd.zero_length;
        bd.warnings.push_back("element " + netlist.resistors[i].name +
                              " has zero length; excluded from analysis");
        continue;
      case ResistorKind::kSegment: break;
    }
    const ResistorCard& r = netlist.resistors[i];
    SegRef s;
    s.resistor = static_cast<int>(i);
    s.from = canonical_index(r.node_a);
    s.to = canonical_index(r.node_b);
    if (s.from == s.to) {
      ++bd.shorts;
      bd.warnings.push_back("element " + r.name +
                            " is shorted end to end; excluded from analysis");
      continue;
    }
    s.layer = geometry.nodes.at(r.node_a).layer;
    ++bd.segments;
    segs.push_back(s);
  }

  // Group by layer in first-seen order.
  std::vector<int> layer_order;
  std::map<int, std::vector<int>> by_layer;  // layer -> indices into segs
  for (std::size_t si = 0; si < segs.size(); ++si) {
    auto [it, inserted] = by_layer.try_emplace(segs[si].layer);
    if (inserted) layer_order.push_back(segs[si].layer);
    it->second.push_back(static_cast<int>(si));
  }

  for (int layer : layer_order) {
    const std::vector<int>& indices = by_layer.at(layer);
    std::unordered_map<int, int> local;  // canonical index -> uf index
    local.reserve(indices.size() * 2);
    auto intern = [&](int canonical) {
      auto [it, inserted] = local.try_emplace(canonical, static_cast<int>(local.size()));
      return it->second;
    };
    std::vector<std::pair<int, int>> ends(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
      ends[k].first = intern(segs[indices[k]].from);
      ends[k].second = intern(segs[indices[k]].to);
    }
    UnionFind uf(local.size());
    for (auto& [a, b] : ends) uf.unite(a, b);

    std::unordered_map<int, int> unit_of_root;
    std::vector<std::vector<int>> unit_segs;  // indices into segs
    for (std::size_t k = 0; k < indices.size(); ++k) {
      int root = uf.find(ends[k].first);
      auto [it, inserted] = unit_of_root.try_emplace(root, static_cast<int>(unit_segs.size()));
      if (inserted) unit_segs.emplace_back();
      unit_segs[it->second].push_back(indices[k]);
    }

    for (const std::vector<int>& members : unit_segs) {
      AnalysisUnit unit;
      unit.layer = layer;
      std::unordered_map<int, int> node_id;  // canonical index -> local id
      auto local_node = [&](int canonical, const std::string& original) {
        auto [it, inserted] = node_id.try_emplace(canonical,
                                                  static_cast<int>(unit.graph.nodes.size()));
        if (inserted) {
          NodeRecord rec;
          rec.id = it->second;
          rec.name = collapse.reduced.node_names()[canonical];
          rec.layer = layer;
          auto found = geometry.nodes.find(original);
          if (found != geometry.nodes.end()) {
            rec.has_position = true;
            rec.x = found->second.x;
            rec.y = found->second.y;
          }
          unit.graph.nodes.push_back(std::move(rec));
          unit.node_voltage.push_back(dc.node_voltage[canonical]);
        }
        return it->second;
      };

      for (int si : members) {
        const SegRef& s = segs[si];
        const ResistorCard& r = netlist.resistors[s.resistor];
        double length = geometry.resistor_length[s.resistor];
        double area = back_calculate_area(params.rho, length, r.ohms);
        double width = std::sqrt(area * options.aspect_ratio);
        double height = area / width;
        double current = dc.resistor_current[reduced_index[s.resistor]];

        Segment seg;
        seg.id = static_cast<int>(unit.graph.segments.size());
        seg.from_node = local_node(s.from, r.node_a);
        seg.to_node = local_node(s.to, r.node_b);
        seg.length = length;
        seg.width = width;
        seg.height = height;
        seg.current_density = -current / area;
        unit.graph.segments.push_back(seg);
        unit.segment_names.push_back(r.name);
      }
      unit.graph.rebuild_adjacency();
      relabel_breadth_first(unit);
      out.units.push_back(std::move(unit));
    }
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, std::size_t>> split_tokens(const std::string& line) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.emplace_back(line.substr(start, i - start), start + 1);
  }
  return out;
}

double parse_double_token(const std::pair<std::string, std::size_t>& tok, int line,
                          const char* what) {
  const std::string& s = tok.first;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw ParseError(std::string("expected ") + what + ", got \"" + s + "\"", line, tok.second);
  return v;
}

long long parse_int_token(const std::pair<std::string, std::size_t>& tok, int line,
                          const char* what) {
  const std::string& s = tok.first;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("expected ") + what + ", got \"" + s + "\"", line, tok.second);
  return v;
}

}  // namespace

UnitSet load_emg(std::istream& in) {
  struct RawNode {
    std::string name;
    int layer = 0;
    double x = 0.0, y = 0.0;
    bool has_voltage = false;
    double voltage = 0.0;
  };
  struct RawSeg {
    long long id = 0;
    int a = 0, b = 0;  // dense node indices
    int layer = 0;
    double l = 0.0, w = 0.0, h = 0.0, j = 0.0;
  };

  std::vector<RawNode> nodes;
  std::unordered_map<long long, int> node_by_id;
  std::unordered_map<std::string, int> node_by_name;
  std::vector<RawSeg> raw_segs;
  std::unordered_map<long long, int> seg_by_id;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_tokens(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].first;
    if (kw == "NODE") {
      if (toks.size() != 6 && toks.size() != 7)
        throw ParseError("NODE takes: id name layer x y [volts]", lineno, toks[0].second);
      RawNode n;
      long long id = parse_int_token(toks[1], lineno, "node id");
      n.name = toks[2].first;
      n.layer = static_cast<int>(parse_int_token(toks[3], lineno, "layer"));
      n.x = parse_double_token(toks[4], lineno, "x coordinate");
      n.y = parse_double_token(toks[5], lineno, "y coordinate");
      if (toks.size() == 7) {
        n.has_voltage = true;
        n.voltage = parse_double_token(toks[6], lineno, "voltage");
      }
      if (!node_by_id.emplace(id, static_cast<int>(nodes.size())).second)
        throw ParseError("duplicate node id " + toks[1].first, lineno, toks[1].second);
      if (!node_by_name.emplace(n.name, static_cast<int>(nodes.size())).second)
        throw ParseError("duplicate node name " + n.name, lineno, toks[2].second);
      nodes.push_back(std::move(n));
    } else if (kw == "SEG") {
      if (toks.size() != 9)
        throw ParseError("SEG takes: id nodeA nodeB layer length width height j", lineno, toks[0].second);
      RawSeg s;
      s.id = parse_int_token(toks[1], lineno, "segment id");
      long long ia = parse_int_token(toks[2], lineno, "node id");
      long long ib = parse_int_token(toks[3], lineno, "node id");
      auto fa = node_by_id.find(ia);
      auto fb = node_by_id.find(ib);
      if (fa == node_by_id.end())
        throw ParseError("unknown node id " + toks[2].first, lineno, toks[2].second);
      if (fb == node_by_id.end())
        throw ParseError("unknown node id " + toks[3].first, lineno, toks[3].second);
      s.a = fa->second;
      s.b = fb->second;
      s.layer = static_cast<int>(parse_int_token(toks[4], lineno, "layer"));
      s.l = parse_double_token(toks[5], lineno, "length");
      s.w = parse_double_token(toks[6], lineno, "width");
      s.h = parse_double_token(toks[7], lineno, "height");
      s.j = parse_double_token(toks[8], lineno, "current density");
      if (!seg_by_id.emplace(s.id, static_cast<int>(raw_segs.size())).second)
        throw ParseError("duplicate segment id " + toks[1].first, lineno, toks[1].second);
      raw_segs.push_back(s);
    } else {
      throw ParseError("unknown record \"" + kw + "\"", lineno, toks[0].second);
    }
  }

  UnitSet out;
  out.breakdown.segments = static_cast<long>(raw_segs.size());

  // Group per (segment layer, connected component).
  std::vector<int> layer_order;
  std::map<int, std::vector<int>> by_layer;
  for (std::size_t si = 0; si < raw_segs.size(); ++si) {
    auto [it, inserted] = by_layer.try_emplace(raw_segs[si].layer);
    if (inserted) layer_order.push_back(raw_segs[si].layer);
    it->second.push_back(static_cast<int>(si));
  }

  std::vector<char> touched(nodes.size(), 0);
  for (int layer : layer_order) {
    const std::vector<int>& indices = by_layer.at(layer);
    std::unordered_map<int, int> local;
    auto intern = [&](int node) {
      auto [it, inserted] = local.try_emplace(node, static_cast<int>(local.size()));
      return it->second;
    };
    std::vector<std::pair<int, int>> ends(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
      ends[k].first = intern(raw_segs[indices[k]].a);
      ends[k].second = intern(raw_segs[indices[k]].b);
      touched[raw_segs[indices[k]].a] = 1;
      touched[raw_segs[indices[k]].b] = 1;
    }
    UnionFind uf(local.size());
    for (auto& [a, b] : ends) uf.unite(a, b);

    std::unordered_map<int, int> unit_of_root;
    std::vector<std::vector<int>> unit_segs;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      int root = uf.find(ends[k].first);
      auto [it, inserted] = unit_of_root.try_emplace(root, static_cast<int>(unit_segs.size()));
      if (inserted) unit_segs.emplace_back();
      unit_segs[it->second].push_back(indices[k]);
    }

    for (const std::vector<int>& members : unit_segs) {
      AnalysisUnit unit;
      unit.layer = layer;
      std::unordered_map<int, int> node_id;
      int with_voltage = 0;
      auto local_node = [&](int raw) {
        auto [it, inserted] = node_id.try_emplace(raw, static_cast<int>(unit.graph.nodes.size()));
        if (inserted) {
          const RawNode& rn = nodes[raw];
          NodeRecord rec;
          rec.id = it->second;
          rec.name = rn.name;
          rec.layer = rn.layer;
          rec.has_position = true;
          rec.x = rn.x;
          rec.y = rn.y;
          unit.graph.nodes.push_back(std::move(rec));
          unit.node_voltage.push_back(rn.voltage);
          if (rn.has_voltage) ++with_voltage;
        }
        return it->second;
      };
      for (int si : members) {
        const RawSeg& s = raw_segs[si];
        Segment seg;
        seg.id = static_cast<int>(unit.graph.segments.size());
        seg.from_node = local_node(s.a);
        seg.to_node = local_node(s.b);
        seg.length = s.l;
        seg.width = s.w;
        seg.height = s.h;
        seg.current_density = s.j;
        unit.graph.segments.push_back(seg);
        unit.segment_names.push_back("s" + std::to_string(s.id));
      }
      if (with_voltage != 0 &&
          with_voltage != static_cast<int>(unit.graph.nodes.size())) {
        for (const NodeRecord& rec : unit.graph.nodes) {
          int raw = node_by_name.at(rec.name);
          if (!nodes[raw].has_voltage)
            throw Error("node " + rec.name +
                        " is missing a voltage while its component has some");
        }
      }
      if (with_voltage == 0) unit.node_voltage.clear();
      unit.graph.rebuild_adjacency();
      out.units.push_back(std::move(unit));
    }
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!touched[i]) {
      ++out.breakdown.dropped_single_node;
      out.breakdown.warnings.push_back("node " + nodes[i].name +
                                       " has no segments; dropped");
    }
  }
  return out;
}

UnitSet load_emg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_emg(in);
}

}  // namespace emss
