#pragma once

#include <vector>

#include "emss/graph.hpp"
#include "emss/material.hpp"
#include "emss/topology.hpp"

namespace emss {

// Steady-state hydrostatic stress at every node of one analysis unit.
// Stresses are absolute (they include the thermal offset).
struct StressResult {
  std::vector<double> node_stress;  // Pa
  double volume = 0.0;              // sum of w*h*l over segments, m^3
  double q_sum = 0.0;               // volume-weighted drift integral, m
};

// O(|V|+|E|) engine driven by branch current densities: one breadth-first
// traversal accumulates the drift sums, then two linear passes close the
// result with the zero-total-mass condition.
StressResult stress_current_based(const InterconnectGraph& graph, double beta,
                                  double sigma_thermal, int root = 0);

// Same computation against a prebuilt spanning tree. Produces bitwise
// identical stresses; used where the tree is needed anyway (cycle checks,
// voltage synthesis).
StressResult stress_current_based(const InterconnectGraph& graph,
                                  const SpanningTree& tree, double beta,
                                  double sigma_thermal);

// Traversal-free engine driven by node voltages. Uses only per-segment
// geometry and endpoint potentials; never builds a tree.
StressResult stress_voltage_based(const InterconnectGraph& graph,
                                  const std::vector<double>& node_voltage,
                                  double beta_over_rho, double sigma_thermal);

// Stress is linear inside a segment with slope -beta*j away from the
// from-node.
double stress_at(const Segment& seg, double sigma_from, double beta, double x);

// Integral of the stress over the segment length.
double stress_integral(const Segment& seg, double sigma_from, double beta);

// Zero total EM-induced mass change: sum_k w*h*integral(sigma - sigma_T)
// over every segment must vanish.
struct MassBalance {
  double absolute = 0.0;  // Pa*m^3
  double relative = 0.0;  // scaled by sum w*h*l*max|sigma - sigma_T|
};
MassBalance mass_balance(const InterconnectGraph& graph, const StressResult& result,
                         double beta, double sigma_thermal);

// Worst violation of sigma_to - sigma_from = -beta*j*l across segments.
struct EdgeConsistency {
  int worst_segment = -1;
  double absolute = 0.0;
  double relative = 0.0;
};
EdgeConsistency edge_consistency(const InterconnectGraph& graph,
                                 const std::vector<double>& node_stress,
                                 double beta);

}  // namespace emss
