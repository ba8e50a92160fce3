#pragma once

#include <vector>

#include "emss/graph.hpp"
#include "emss/material.hpp"

namespace emss {

// Ground-truth solvers, deliberately simple and slow. Test/diagnostic use
// only.

// Assembles and solves the full |V| x |V| linear system: one stress
// difference equation per spanning-tree segment plus the zero-total-mass
// row. Limited to 5000 nodes.
std::vector<double> dense_solve(const InterconnectGraph& graph, double beta,
                                double sigma_thermal);

struct TransientOptions {
  int cells_per_segment = 64;    // >= 8
  double rel_change_tol = 1e-8;  // change of max|sigma| per diffusion time
  long max_steps = 50000;
};

struct TransientResult {
  std::vector<double> node_stress;  // Pa, thermal included
  long steps = 0;
  double elapsed_time = 0.0;           // integrated physical time, s
  double final_rel_change = 0.0;
  double max_mass_residual = 0.0;      // worst relative mass error over the run
  double terminus_flux_residual = 0.0; // relative to kappa*beta*max|j|
};

// Integrates the stress diffusion equation from sigma = 0 with implicit
// time stepping and a conservative finite-volume discretization
// (cell-centered samples; node values are algebraic unknowns closed by the
// width-weighted flux balance, which reduces to zero flux at termini).
// Limited to 50 segments.
TransientResult transient_steady_state(const InterconnectGraph& graph,
                                       const DerivedConstants& constants,
                                       double sigma_thermal,
                                       const TransientOptions& options = {});

}  // namespace emss
