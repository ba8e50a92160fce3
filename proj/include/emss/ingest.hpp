#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "emss/dc.hpp"
#include "emss/graph.hpp"
#include "emss/material.hpp"
#include "emss/netlist.hpp"

namespace emss {

// Node-label coordinate rule. The pattern is a literal string with
// `<layer>`, `<x>`, `<y>` placeholders (each matching a signed integer) and
// an optional leading `*` wildcard; coordinates are multiplied by `unit` to
// get meters.
inline constexpr const char* kDefaultNodePattern = "n<layer>_<x>_<y>";

struct NamingRule {
  std::string pattern = kDefaultNodePattern;
  double unit = 1e-6;
};

struct NodeGeometry {
  int layer = 0;
  double x = 0.0;  // m
  double y = 0.0;  // m
};

enum class ResistorKind : uint8_t {
  kSegment,        // intra-layer, R > 0, positive length
  kVia,            // endpoints on different layers; blocking boundary
  kShort,          // R == 0, endpoints merged before analysis
  kGroundAttached, // touches the ground node; not an EM segment
  kZeroLength,     // same position endpoints, excluded with a warning
};

struct LayerGeometry {
  std::unordered_map<std::string, NodeGeometry> nodes;
  std::vector<ResistorKind> resistor_kind;  // parallel to netlist.resistors
  std::vector<double> resistor_length;      // m, meaningful for kSegment
};

// Decodes every resistor endpoint label (ground exempt) under the rule and
// classifies each resistor. Unparseable labels raise one error listing the
// offenders (capped at 20).
LayerGeometry decode_geometry(const Netlist& netlist, const NamingRule& rule);

// w*h = rho*l/R, so that R = rho*l/(w*h) holds exactly.
double back_calculate_area(double rho, double length, double ohms);

// Connected per-layer component extracted for EM analysis. Node ids are
// unit-local and dense; names map back to the netlist.
struct AnalysisUnit {
  InterconnectGraph graph;
  int layer = 0;
  std::vector<std::string> segment_names;
  std::vector<double> node_voltage;  // V per local node; empty when unknown
};

struct UnitBuildOptions {
  double aspect_ratio = 1.0;  // w/h split of the back-calculated area
};

struct UnitBreakdown {
  long segments = 0;
  long vias = 0;
  long shorts = 0;
  long ground_attached = 0;
  long zero_length = 0;
  long sources = 0;
  long dropped_single_node = 0;
  std::vector<std::string> warnings;

  long total_elements() const {
    return segments + vias + shorts + ground_attached + zero_length + sources;
  }
};

struct UnitSet {
  std::vector<AnalysisUnit> units;
  UnitBreakdown breakdown;
};

// Splits the design into per-layer connected components over EM segments.
// Currents convert to the electron convention: j = -I_conventional/(w*h).
// `dc` must be the solution of `collapse.reduced`.
UnitSet build_units(const Netlist& netlist, const LayerGeometry& geometry,
                    const ShortCollapse& collapse, const DcSolution& dc,
                    const MaterialParams& params,
                    const UnitBuildOptions& options = {});

// Native geometric format, SI units, `#` comments:
//   NODE <id> <name> <layer> <x> <y> [volts]
//   SEG  <id> <nodeA> <nodeB> <layer> <length> <width> <height> <j>
// Voltages are all-or-nothing per connected component.
UnitSet load_emg(std::istream& in);
UnitSet load_emg_file(const std::string& path);

}  // namespace emss
