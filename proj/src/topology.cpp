#include "emss/topology.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "emss/common.hpp"

namespace emss {
namespace {

std::atomic<long> g_traversals{0};

}  // namespace

long traversal_count() { return g_traversals.load(); }
void reset_traversal_count() { g_traversals.store(0); }

namespace detail {
void count_traversal() { g_traversals.fetch_add(1, std::memory_order_relaxed); }
}  // namespace detail

SpanningTree build_spanning_tree(const InterconnectGraph& graph, int root) {
  const int n = graph.node_count();
  if (n == 0) throw Error("cannot build a spanning tree of an empty graph");
  if (root < 0 || root >= n) throw Error("spanning tree root out of range");
  if (!graph.adjacency_current())
    throw Error("adjacency is stale; rebuild it before traversing");
  detail::count_traversal();

  SpanningTree tree;
  tree.root = root;
  tree.parent.assign(n, -2);  // -2 means unvisited, the root becomes -1
  tree.parent_segment.assign(n, -1);
  tree.direction.assign(n, 0);

  // tree.order doubles as the BFS queue: nodes are appended when discovered
  // and scanned once in place.
  tree.order.reserve(n);
  tree.order.push_back(root);
  tree.parent[root] = -1;
  const int* offsets = graph.adj_offsets.data();
  const AdjacencyEntry* entries = graph.adj_entries.data();
  int* parent = tree.parent.data();
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    int node = tree.order[head];
    if (head + 4 < tree.order.size()) {
      int ahead = tree.order[head + 4];
      __builtin_prefetch(entries + offsets[ahead]);
    }
    for (const AdjacencyEntry* e = entries + offsets[node],
                              * end = entries + offsets[node + 1];
         e != end; ++e) {
      int next = e->neighbor;
      if (parent[next] != -2) continue;
      parent[next] = node;
      tree.parent_segment[next] = e->segment();
      tree.direction[next] = static_cast<int8_t>(e->orientation());
      tree.order.push_back(next);
    }
  }
  if (static_cast<int>(tree.order.size()) != n) {
    for (int v = 0; v < n; ++v)
      if (tree.parent[v] == -2)
        throw Error("graph is not connected: node " + graph.nodes[v].name +
                    " is unreachable from the root");
  }
  return tree;
}

std::vector<int> removed_segments(const InterconnectGraph& graph,
                                  const SpanningTree& tree) {
  std::vector<char> used(graph.segments.size(), 0);
  for (int v : tree.order)
    if (v != tree.root) used[tree.parent_segment[v]] = 1;
  std::vector<int> out;
  for (std::size_t s = 0; s < used.size(); ++s)
    if (!used[s]) out.push_back(static_cast<int>(s));
  return out;
}

std::vector<double> path_jl_sums(const InterconnectGraph& graph,
                                 const SpanningTree& tree) {
  const std::size_t n = tree.order.size();
  std::vector<double> sums(graph.node_count(), 0.0);
  const double* jl = graph.seg_jl.data();
  const int* order = tree.order.data();
  const int* pseg = tree.parent_segment.data();
  const int* parent = tree.parent.data();
  const int8_t* dir = tree.direction.data();
  for (std::size_t i = 1; i < n; ++i) {
    if (i + 8 < n) {
      int ahead = order[i + 8];
      __builtin_prefetch(jl + pseg[ahead]);
    }
    int node = order[i];
    sums[node] = sums[parent[node]] + dir[node] * jl[pseg[node]];
  }
  return sums;
}

std::vector<double> integrate_path_voltages(const InterconnectGraph& graph,
                                            const SpanningTree& tree, double rho) {
  std::vector<double> volts(graph.node_count(), 0.0);
  const double* jl = graph.seg_jl.data();
  for (int node : tree.order) {
    if (node == tree.root) continue;
    volts[node] = volts[tree.parent[node]] +
                  rho * tree.direction[node] * jl[tree.parent_segment[node]];
  }
  return volts;
}

std::vector<CycleResidual> cycle_residuals(const InterconnectGraph& graph,
                                           const SpanningTree& tree,
                                           const std::vector<double>& jl_sums) {
  std::vector<int> removed = removed_segments(graph, tree);
  std::vector<CycleResidual> out;
  out.reserve(removed.size());

  // Residuals are judged against the whole unit's drift scale. A cycle
  // whose own currents are near zero would otherwise turn rounding noise
  // into a huge relative number while the stress everywhere is unaffected.
  double scale = 0.0;
  for (double jl : graph.seg_jl) scale = std::max(scale, std::abs(jl));

  for (int s : removed) {
    const Segment& seg = graph.segments[s];
    CycleResidual res;
    res.segment = s;
    double drift = seg.current_density * seg.length;
    res.absolute = std::abs(jl_sums[seg.from_node] + drift - jl_sums[seg.to_node]);
    res.relative = scale > 0.0 ? res.absolute / scale : 0.0;
    out.push_back(res);
  }
  return out;
}

}  // namespace emss
