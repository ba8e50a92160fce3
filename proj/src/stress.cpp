#include "emss/stress.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "emss/common.hpp"

namespace emss {
namespace {

// Store that bypasses the cache where supported. Used for output values
// that are revisited exactly once, so the revisit costs the same whether or
// not the working set fits in cache and runtime stays proportional to size
// across cache tiers.
inline void stream_store(double* p, double v) {
#if defined(__SSE2__)
  _mm_stream_si64(reinterpret_cast<long long*>(p), std::bit_cast<long long>(v));
#else
  *p = v;
#endif
}

inline void stream_fence() {
#if defined(__SSE2__)
  _mm_sfence();
#endif
}

}  // namespace

StressResult stress_current_based(const InterconnectGraph& graph, double beta,
                                  double sigma_thermal, int root) {
  const int n = graph.node_count();
  if (n == 0) throw Error("cannot analyze an empty graph");
  if (root < 0 || root >= n) throw Error("traversal root out of range");
  if (!graph.adjacency_current())
    throw Error("adjacency is stale; rebuild it before traversing");
  detail::count_traversal();

  StressResult out;
  out.volume = graph.total_volume;
  if (!(out.volume > 0.0))
    throw Error("unit has no metal volume; stress is undefined");

  // Drift sums accumulate straight into the output buffer and are converted
  // to stresses in place at the end. NaN marks undiscovered nodes; finite
  // inputs mean the sentinel cannot collide with a real sum.
  out.node_stress.assign(n, std::numeric_limits<double>::quiet_NaN());
  double* drift = out.node_stress.data();
  drift[root] = 0.0;

  // The drift integral is accumulated while each sum is still in a
  // register: q contributions are per-node dot terms, so no second pass
  // over the drift array is needed before the stress conversion.
  std::vector<int> queue;
  queue.reserve(n);
  queue.push_back(root);
  const int* offsets = graph.adj_offsets.data();
  const AdjacencyEntry* entries = graph.adj_entries.data();
  const double* jl = graph.seg_jl.data();
  const double* nfv = graph.node_from_volume.data();
  KahanSum q;
  q.add(drift[root] * nfv[root]);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int node = queue[head];
    if (head + 4 < queue.size())
      __builtin_prefetch(entries + offsets[queue[head + 4]]);
    double at_node = drift[node];
    for (const AdjacencyEntry* e = entries + offsets[node],
                              * end = entries + offsets[node + 1];
         e != end; ++e) {
      int next = e->neighbor;
      if (drift[next] == drift[next]) continue;  // already discovered
      double sum = at_node + e->orientation() * jl[e->segment()];
      drift[next] = sum;
      q.add(sum * nfv[next]);
      queue.push_back(next);
    }
  }
  if (static_cast<int>(queue.size()) != n) {
    for (int v = 0; v < n; ++v)
      if (drift[v] != drift[v])
        throw Error("graph is not connected: node " + graph.nodes[v].name +
                    " is unreachable from the root");
  }

  out.q_sum = q.value() + graph.drift_ramp_volume;
  double base = out.q_sum / out.volume;
  // Walked in reverse so the tail of the drift array, still cache-resident
  // from the traversal, is converted first.
  for (int i = n - 1; i >= 0; --i)
    out.node_stress[i] = beta * (base - out.node_stress[i]) + sigma_thermal;
  return out;
}

StressResult stress_current_based(const InterconnectGraph& graph,
                                  const SpanningTree& tree, double beta,
                                  double sigma_thermal) {
  std::vector<double> drift = path_jl_sums(graph, tree);

  StressResult out;
  out.volume = graph.total_volume;
  if (!(out.volume > 0.0))
    throw Error("unit has no metal volume; stress is undefined");

  // Same accumulation order as the traversal overload (root first, then
  // discovery order), so the two produce bitwise identical stresses.
  const double* nfv = graph.node_from_volume.data();
  KahanSum q;
  for (int v : tree.order) q.add(drift[v] * nfv[v]);
  out.q_sum = q.value() + graph.drift_ramp_volume;

  double base = out.q_sum / out.volume;
  out.node_stress.resize(graph.node_count());
  for (int i = 0; i < graph.node_count(); ++i)
    out.node_stress[i] = beta * (base - drift[i]) + sigma_thermal;
  return out;
}

StressResult stress_voltage_based(const InterconnectGraph& graph,
                                  const std::vector<double>& node_voltage,
                                  double beta_over_rho, double sigma_thermal) {
  const int n = graph.node_count();
  if (node_voltage.size() != static_cast<std::size_t>(n))
    throw Error("voltage engine needs one voltage per node");
  if (!graph.adjacency_current())
    throw Error("adjacency is stale; rebuild it before analyzing");

  StressResult out;
  out.volume = graph.total_volume;
  if (!(out.volume > 0.0))
    throw Error("unit has no metal volume; stress is undefined");
  out.node_stress.resize(n);

  // The volume-weighted mean of segment-average voltages regroups into a
  // plain dot product with the per-node weights, so this engine streams
  // node arrays and touches nothing per segment. The per-node part of the
  // stress is emitted in the same pass, while the voltage is in a register;
  // only the mean shift needs a second pass.
  const double* w = graph.node_weight.data();
  const double* volts = node_voltage.data();
  double* prelim = out.node_stress.data();
  KahanSum lane0, lane1, lane2, lane3;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    double v0 = volts[i], v1 = volts[i + 1];
    double v2 = volts[i + 2], v3 = volts[i + 3];
    lane0.add(w[i] * v0);
    lane1.add(w[i + 1] * v1);
    lane2.add(w[i + 2] * v2);
    lane3.add(w[i + 3] * v3);
    stream_store(prelim + i, sigma_thermal - beta_over_rho * v0);
    stream_store(prelim + i + 1, sigma_thermal - beta_over_rho * v1);
    stream_store(prelim + i + 2, sigma_thermal - beta_over_rho * v2);
    stream_store(prelim + i + 3, sigma_thermal - beta_over_rho * v3);
  }
  for (; i < n; ++i) {
    lane0.add(w[i] * volts[i]);
    prelim[i] = sigma_thermal - beta_over_rho * volts[i];
  }
  stream_fence();

  out.q_sum = ((lane0.value() + lane1.value()) + lane2.value()) + lane3.value();
  double shift = beta_over_rho * (out.q_sum / out.volume);
  for (int k = 0; k < n; ++k) out.node_stress[k] += shift;
  return out;
}

double stress_at(const Segment& seg, double sigma_from, double beta, double x) {
  return sigma_from - beta * seg.current_density * x;
}

double stress_integral(const Segment& seg, double sigma_from, double beta) {
  return sigma_from * seg.length -
         beta * seg.current_density * seg.length * seg.length * 0.5;
}

MassBalance mass_balance(const InterconnectGraph& graph, const StressResult& result,
                         double beta, double sigma_thermal) {
  KahanSum total;
  double peak = 0.0;
  KahanSum volume;
  for (const Segment& seg : graph.segments) {
    double sigma_from = result.node_stress[seg.from_node] - sigma_thermal;
    double sigma_to = result.node_stress[seg.to_node] - sigma_thermal;
    total.add(seg.width * seg.height * stress_integral(seg, sigma_from, beta));
    volume.add(seg.width * seg.height * seg.length);
    peak = std::max({peak, std::abs(sigma_from), std::abs(sigma_to)});
  }
  MassBalance out;
  out.absolute = total.value();
  double scale = volume.value() * peak;
  out.relative = scale > 0.0 ? std::abs(out.absolute) / scale : std::abs(out.absolute);
  return out;
}

EdgeConsistency edge_consistency(const InterconnectGraph& graph,
                                 const std::vector<double>& node_stress,
                                 double beta) {
  EdgeConsistency out;
  double scale = 0.0;
  for (const Segment& seg : graph.segments) {
    double drop = beta * seg.current_density * seg.length;
    double dev = std::abs(node_stress[seg.to_node] - node_stress[seg.from_node] + drop);
    scale = std::max({scale, std::abs(drop), std::abs(node_stress[seg.from_node])});
    if (dev > out.absolute) {
      out.absolute = dev;
      out.worst_segment = seg.id;
    }
  }
  out.relative = scale > 0.0 ? out.absolute / scale : out.absolute;
  return out;
}

}  // namespace emss
