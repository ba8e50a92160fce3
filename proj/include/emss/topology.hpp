#pragma once

#include <cstdint>
#include <vector>

#include "emss/graph.hpp"

namespace emss {

// BFS spanning tree rooted at the smallest node id. Neighbors are visited in
// ascending segment id, which makes the tree deterministic for a given
// adjacency.
struct SpanningTree {
  int root = 0;
  std::vector<int> parent;          // -1 at the root
  std::vector<int> parent_segment;  // segment joining node to parent
  std::vector<int8_t> direction;    // +1 when the segment points parent->node
  std::vector<int> order;           // BFS order, root first
};

SpanningTree build_spanning_tree(const InterconnectGraph& graph, int root = 0);

// Segments that are not tree edges; each closes one independent cycle.
std::vector<int> removed_segments(const InterconnectGraph& graph,
                                  const SpanningTree& tree);

// How many graph traversals (tree builds or fused walks) ran since the last
// reset. Lets tests prove that a code path did not traverse the graph.
long traversal_count();
void reset_traversal_count();

namespace detail {
void count_traversal();
}

// Directed j*l accumulated from the root to every node along tree paths.
std::vector<double> path_jl_sums(const InterconnectGraph& graph,
                                 const SpanningTree& tree);

// Voltage drop integrated along tree paths: V[child] = V[parent] + rho*j*l
// with j in the electron convention (so conventional current flows from
// high to low potential). V[root] = 0.
std::vector<double> integrate_path_voltages(const InterconnectGraph& graph,
                                            const SpanningTree& tree, double rho);

struct CycleResidual {
  int segment = 0;     // the removed segment closing the cycle
  double absolute = 0; // |B[a] + j*l - B[b]|
  double relative = 0; // absolute / max |j*l| in the unit (0 when all zero)
};

// Kirchhoff-style consistency of the drift sums around each independent
// cycle (one per removed segment). All residuals are zero exactly when every
// spanning tree yields the same steady state.
std::vector<CycleResidual> cycle_residuals(const InterconnectGraph& graph,
                                           const SpanningTree& tree,
                                           const std::vector<double>& jl_sums);

}  // namespace emss
