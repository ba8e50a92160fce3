#pragma once

#include <string>
#include <vector>

#include "emss/netlist.hpp"

namespace emss {

struct DcSolution {
  std::vector<double> node_voltage;     // by netlist node index, V
  std::vector<double> resistor_current; // conventional, + from node_a to node_b, A
  double residual_norm = 0.0;           // achieved relative residual
};

struct DcOptions {
  double tolerance = 1e-8;   // relative residual bound
  int direct_limit = 200000; // unknown count above which CG is used
  int max_iterations = 500000;
};

// Nodal / modified nodal solve. Node "0" is the reference when present;
// otherwise the negative terminal of the first voltage source is grounded.
// Branch currents are derived from the voltage solution by Ohm's law.
DcSolution solve_dc(const Netlist& netlist, const DcOptions& options = {});

// Maximum absolute nodal current imbalance over nodes with no source
// attachment; the gate run before EM analysis.
double verify_solution(const Netlist& netlist, const DcSolution& dc);

// Precomputed node voltages (CSV `name,volts`) instead of solve_dc; currents
// derived by Ohm's law. Every netlist node must be covered.
DcSolution import_voltages(const Netlist& netlist, const std::string& csv_path);

}  // namespace emss
