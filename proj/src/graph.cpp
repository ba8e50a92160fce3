#include "emss/graph.hpp"

#include <cmath>
#include <unordered_set>

#include "emss/common.hpp"

namespace emss {

void InterconnectGraph::rebuild_adjacency() {
  const int n = node_count();
  const int m = segment_count();
  if (m >= (1 << 30))
    throw Error("too many segments for the packed adjacency layout");

  adj_offsets.assign(n + 1, 0);
  auto in_range = [n](int v) { return v >= 0 && v < n; };
  for (const Segment& s : segments) {
    if (!in_range(s.from_node) || !in_range(s.to_node)) continue;
    ++adj_offsets[s.from_node + 1];
    if (s.to_node != s.from_node) ++adj_offsets[s.to_node + 1];
  }
  for (int v = 0; v < n; ++v) adj_offsets[v + 1] += adj_offsets[v];

  adj_entries.assign(adj_offsets[n], {});
  std::vector<int> cursor(adj_offsets.begin(), adj_offsets.end() - 1);
  // Segments are appended in ascending id order, so each row comes out
  // sorted without a separate pass.
  for (const Segment& s : segments) {
    if (!in_range(s.from_node) || !in_range(s.to_node)) continue;
    adj_entries[cursor[s.from_node]++] = {s.to_node,
                                          AdjacencyEntry::pack(s.id, true)};
    if (s.to_node != s.from_node)
      adj_entries[cursor[s.to_node]++] = {s.from_node,
                                          AdjacencyEntry::pack(s.id, false)};
  }

  seg_from.resize(m);
  seg_to.resize(m);
  seg_volume.resize(m);
  seg_jl.resize(m);
  node_weight.assign(n, 0.0);
  node_from_volume.assign(n, 0.0);
  KahanSum volume;
  KahanSum ramps;
  for (int i = 0; i < m; ++i) {
    const Segment& s = segments[i];
    seg_from[i] = s.from_node;
    seg_to[i] = s.to_node;
    seg_volume[i] = s.width * s.height * s.length;
    seg_jl[i] = s.current_density * s.length;
    volume.add(seg_volume[i]);
    ramps.add(seg_volume[i] * (seg_jl[i] * 0.5));
    if (in_range(s.from_node) && in_range(s.to_node)) {
      node_weight[s.from_node] += 0.5 * seg_volume[i];
      node_weight[s.to_node] += 0.5 * seg_volume[i];
      node_from_volume[s.from_node] += seg_volume[i];
    }
  }
  total_volume = volume.value();
  drift_ramp_volume = ramps.value();
}

std::vector<Violation> validate_graph(const InterconnectGraph& g) {
  std::vector<Violation> out;
  auto node_bad = [&](int id, const std::string& msg) {
    out.push_back({id, -1, msg});
  };
  auto seg_bad = [&](int id, const std::string& msg) {
    out.push_back({-1, id, msg});
  };

  std::unordered_set<std::string> names;
  for (int i = 0; i < g.node_count(); ++i) {
    const NodeRecord& n = g.nodes[i];
    if (n.id != i) node_bad(i, "node ids must be dense 0..|V|-1");
    if (!n.name.empty() && !names.insert(n.name).second)
      node_bad(i, "duplicate node name: " + n.name);
    if (n.has_position && (!std::isfinite(n.x) || !std::isfinite(n.y)))
      node_bad(i, "node position must be finite");
  }

  for (int i = 0; i < g.segment_count(); ++i) {
    const Segment& s = g.segments[i];
    if (s.id != i) seg_bad(i, "segment ids must be dense 0..|E|-1");
    if (s.from_node < 0 || s.from_node >= g.node_count() || s.to_node < 0 ||
        s.to_node >= g.node_count()) {
      seg_bad(i, "segment endpoint out of range");
      continue;
    }
    if (s.from_node == s.to_node) seg_bad(i, "self-loop segment");
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      seg_bad(i, "length must be positive");
    if (!(s.width > 0.0) || !std::isfinite(s.width))
      seg_bad(i, "width must be positive");
    if (!(s.height > 0.0) || !std::isfinite(s.height))
      seg_bad(i, "height must be positive");
    if (!std::isfinite(s.current_density))
      seg_bad(i, "current density must be finite");
  }

  if (!g.adjacency_current()) {
    out.push_back({-1, -1, "adjacency is stale; rebuild it"});
    return out;
  }
  // each segment must appear under exactly its two endpoints
  std::vector<int> appearances(g.segments.size(), 0);
  for (int v = 0; v < g.node_count(); ++v) {
    for (const AdjacencyEntry* e = g.adj_begin(v); e != g.adj_end(v); ++e) {
      if (e->segment() < 0 || e->segment() >= g.segment_count()) {
        node_bad(v, "adjacency references unknown segment");
        continue;
      }
      const Segment& s = g.segments[e->segment()];
      bool endpoint = (s.from_node == v && s.to_node == e->neighbor &&
                       e->orientation() == 1) ||
                      (s.to_node == v && s.from_node == e->neighbor &&
                       e->orientation() == -1);
      if (!endpoint)
        seg_bad(e->segment(), "adjacency entry disagrees with segment endpoints");
      ++appearances[e->segment()];
    }
  }
  for (int i = 0; i < g.segment_count(); ++i) {
    if (appearances[i] != 2)
      seg_bad(i, "segment must appear under exactly two nodes");
  }
  return out;
}

}  // namespace emss
