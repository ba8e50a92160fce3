#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "emss/ingest.hpp"
#include "emss/material.hpp"

namespace emss {

// Exit codes: 0 ok, 1 error, 2 validation failure under --strict.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidation = 2;

struct RunConfig {
  std::vector<std::string> inputs;  // .emg or SPICE by extension
  std::string tech_path;            // empty = built-in defaults
  std::string method = "both";      // current | voltage | both
  double jl_crit_override = 0.0;    // > 0 replaces the technology value
  bool strict = false;
  std::string json_path;     // empty = stdout
  std::string csv_path;      // per-segment verdicts
  std::string nodes_path;    // per-node stress dump
  std::string scatter_path;  // j vs l scatter with confusion cells
  bool include_nodes = true;
  int threads = 0;  // 0 = EM_STEADY_THREADS env or hardware
  NamingRule naming;
  double aspect_ratio = 1.0;
  std::string voltages_csv;  // import node voltages instead of DC solving
  bool quiet = false;
};

int resolve_threads(int requested);

int run_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

struct OracleCheckConfig {
  RunConfig base;
  int random_instances = 0;  // additionally check this many random units
  std::uint64_t seed = 42;
  int max_nodes = 200;
  double corrupt_factor = 1.0;  // != 1 scales one segment's j, for testing
  int corrupt_segment = 0;
};
int run_oracle_check(const OracleCheckConfig& config, std::ostream& out,
                     std::ostream& err);

struct BenchConfig {
  std::vector<long> sizes{10000, 100000, 1000000};
  int repeats = 3;
  std::string csv_path;
  std::uint64_t seed = 1;
  std::string tech_path;
};
int run_bench(const BenchConfig& config, std::ostream& out, std::ostream& err);

}  // namespace emss
