#pragma once

#include <cstdint>

#include "emss/ingest.hpp"
#include "emss/netlist.hpp"

namespace emss {

// Power-grid-style single-layer mesh: rows x cols nodes named on the
// default coordinate rule, randomized pitches/cross-sections, voltage pads
// on a regular stride and randomized current loads to ground.
struct GridOptions {
  int rows = 100;
  int cols = 100;
  int pad_stride = 32;
  double pad_volts = 1.0;
  double load_probability = 0.25;
  std::uint64_t seed = 1;
};

Netlist synthetic_grid(const GridOptions& options);

// Random connected unit: a random tree plus `extra_edges` chords (parallel
// segments allowed, no self loops). With `use_dc` the branch currents and
// node voltages come from a DC solve of the equivalent resistor network
// with randomized sources; otherwise node potentials are assigned directly
// and currents derived from them, which is faster and still consistent.
struct RandomUnitOptions {
  int nodes = 50;
  int extra_edges = 0;
  std::uint64_t seed = 1;
  bool use_dc = true;
  double rho = 2.25e-8;  // must match the technology used for analysis
};

AnalysisUnit random_unit(const RandomUnitOptions& options);

// Full ingestion of a synthetic grid: decode, DC solve, unit building.
struct PreparedGrid {
  UnitSet units;
  double dc_ms = 0.0;
  double dc_residual = 0.0;
};

PreparedGrid prepare_grid(const GridOptions& options, const MaterialParams& params);

}  // namespace emss
