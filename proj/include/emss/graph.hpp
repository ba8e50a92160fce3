#pragma once

#include <string>
#include <vector>

namespace emss {

struct NodeRecord {
  int id = -1;
  std::string name;
  int layer = 0;
  bool has_position = false;
  double x = 0.0;  // m
  double y = 0.0;  // m
};

// Wire segment with a reference direction from_node -> to_node. The current
// density is signed in the ELECTRON-current convention: positive when
// electrons flow along the reference direction.
struct Segment {
  int id = -1;
  int from_node = -1;
  int to_node = -1;
  double length = 0.0;           // m
  double width = 0.0;            // m
  double height = 0.0;           // m
  double current_density = 0.0;  // A/m^2, electron convention

  double area() const { return width * height; }
};

// One endpoint's view of a segment, packed to eight bytes so traversals
// stream less memory. `link` carries the segment id in the upper bits and
// the orientation in bit 0.
struct AdjacencyEntry {
  int neighbor = -1;
  int link = -1;

  int segment() const { return link >> 1; }
  // +1 when the segment's reference direction points away from the row's
  // node, -1 when it points into it. Lets traversals orient an edge without
  // touching the segment table.
  int orientation() const { return (link & 1) ? 1 : -1; }

  static int pack(int segment, bool away) {
    return (segment << 1) | (away ? 1 : 0);
  }
};

// Undirected multigraph; may contain cycles. Immutable once built.
struct InterconnectGraph {
  std::vector<NodeRecord> nodes;
  std::vector<Segment> segments;

  // CSR adjacency: entries for node v live in
  // [adj_offsets[v], adj_offsets[v+1]), sorted by ascending segment id so
  // traversals are deterministic. Every non-loop segment appears in exactly
  // two rows.
  std::vector<int> adj_offsets;
  std::vector<AdjacencyEntry> adj_entries;

  // Flat per-segment copies the solvers stream instead of the segment
  // structs. Kept in sync by rebuild_adjacency.
  std::vector<int> seg_from;
  std::vector<int> seg_to;
  std::vector<double> seg_volume;  // w*h*l, m^3
  std::vector<double> seg_jl;      // current_density*length, A/m
  double total_volume = 0.0;       // compensated sum of seg_volume, m^3

  // Half the total volume of the segments incident to each node: the node's
  // weight in any volume-averaged quantity, since each segment contributes
  // the average of its endpoint values.
  std::vector<double> node_weight;

  // Total volume of the segments whose reference direction leaves each node,
  // and the volume integral of the within-segment drift ramps
  // (sum of w*h*l * j*l/2). Together they turn the volume-weighted drift
  // integral into a per-node dot product:
  //   q = sum_v drift[v] * node_from_volume[v] + drift_ramp_volume.
  std::vector<double> node_from_volume;
  double drift_ramp_volume = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int segment_count() const { return static_cast<int>(segments.size()); }

  int degree(int v) const { return adj_offsets[v + 1] - adj_offsets[v]; }
  const AdjacencyEntry* adj_begin(int v) const {
    return adj_entries.data() + adj_offsets[v];
  }
  const AdjacencyEntry* adj_end(int v) const {
    return adj_entries.data() + adj_offsets[v + 1];
  }

  bool adjacency_current() const {
    return adj_offsets.size() == nodes.size() + 1 &&
           seg_from.size() == segments.size() &&
           node_weight.size() == nodes.size() &&
           node_from_volume.size() == nodes.size();
  }

  // Recomputes the CSR adjacency and the flat per-segment arrays from the
  // segment list. Call again after mutating topology, geometry or currents.
  void rebuild_adjacency();
};

struct Violation {
  int node = -1;     // -1 when not node-related
  int segment = -1;  // -1 when not segment-related
  std::string message;
};

// Violations are data, not exceptions: empty result iff all invariants hold.
std::vector<Violation> validate_graph(const InterconnectGraph& graph);

}  // namespace emss
