#pragma once

#include <limits>
#include <string>
#include <vector>

#include "emss/graph.hpp"
#include "emss/stress.hpp"

namespace emss {

// Per-segment immortality verdicts. "Positive" means predicted immortal by
// the classical jl filter; the exact verdict comes from the steady-state
// endpoint stresses.
struct SegmentVerdict {
  int segment = 0;  // unit-local id
  std::string name;
  double length = 0.0;       // m
  double abs_j = 0.0;        // A/m^2
  double jl = 0.0;           // |j|*l, A/m
  double peak_stress = 0.0;  // max endpoint stress, Pa
  bool exact_immortal = false;
  bool blech_immortal = false;
  bool boundary_tie = false;  // sat exactly on a threshold

  const char* cell() const {
    if (blech_immortal) return exact_immortal ? "TP" : "FP";
    return exact_immortal ? "FN" : "TN";
  }
};

struct ConfusionCounts {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Immortal iff the larger (tensile) endpoint stress stays below the
// critical stress; equality counts as immortal and is flagged as a tie.
// Stress and sigma_crit are absolute (thermal included).
std::vector<bool> exact_verdicts(const InterconnectGraph& graph,
                                 const std::vector<double>& node_stress,
                                 double sigma_crit, std::vector<int>* ties = nullptr);

// Immortal iff |j|*l <= jl_crit (boundary inclusive).
std::vector<bool> blech_verdicts(const InterconnectGraph& graph, double jl_crit,
                                 std::vector<int>* ties = nullptr);

ConfusionCounts compare_verdicts(const std::vector<bool>& exact,
                                 const std::vector<bool>& blech);

// Full verdict record for one unit.
std::vector<SegmentVerdict> screen_unit(const InterconnectGraph& graph,
                                        const std::vector<std::string>& names,
                                        const std::vector<double>& node_stress,
                                        double sigma_crit, double jl_crit);

// Assembled analysis output. Serialization is deterministic (units in index
// order, nodes and segments by id); only the timestamp varies between runs.
struct AnalysisReport {
  struct NodeRow {
    std::string name;
    double stress_pa = 0.0;
    // Second engine's value when both ran; NaN = absent.
    double stress_voltage_pa = std::numeric_limits<double>::quiet_NaN();
  };
  struct UnitRow {
    int id = 0;
    std::vector<NodeRow> nodes;
    std::vector<SegmentVerdict> segments;
  };
  std::vector<UnitRow> units;
  ConfusionCounts totals;
  double runtime_current_ms = -1.0;  // negative = not run
  double runtime_voltage_ms = -1.0;
  double runtime_dc_ms = -1.0;
  std::string tool;
  std::string config;
  std::string timestamp;
};

std::string report_json(const AnalysisReport& report);
std::string report_csv(const AnalysisReport& report);          // one row per segment
std::string report_nodes_csv(const AnalysisReport& report);    // one row per node
std::string report_scatter_csv(const AnalysisReport& report);  // j vs l with cell

std::string utc_timestamp();

}  // namespace emss
