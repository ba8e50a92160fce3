#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emss/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady-state electromigration stress analysis and immortality "
               "screening for on-chip interconnect trees and meshes"};
  app.require_subcommand(1);

  emss::RunConfig cfg;
  std::string pattern;
  double unit_m = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("inputs", cfg.inputs, "input files (.emg or SPICE)")
        ->required();
    cmd->add_option("-t,--tech", cfg.tech_path, "technology parameter file");
    cmd->add_option("--pattern", pattern,
                    "node label pattern (default n<layer>_<x>_<y>)");
    cmd->add_option("--unit", unit_m, "coordinate unit in meters (default 1e-6)");
    cmd->add_option("--aspect", cfg.aspect_ratio,
                    "width/height split of back-calculated areas");
    cmd->add_option("--voltages", cfg.voltages_csv,
                    "node voltage CSV (skips the internal DC solve)");
    cmd->add_option("-j,--threads", cfg.threads,
                    "worker threads (default: EM_STEADY_THREADS or hardware)");
    cmd->add_flag("-q,--quiet", cfg.quiet, "suppress progress output");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "compute steady-state stress and screen segments");
  add_common(analyze);
  analyze->add_option("-m,--method", cfg.method, "current | voltage | both")
      ->check(CLI::IsMember({"current", "voltage", "both"}));
  analyze->add_option("--jl-crit", cfg.jl_crit_override,
                      "override the immortality threshold (A/m)");
  analyze->add_flag("--strict", cfg.strict, "fail on validation findings");
  analyze->add_option("-o,--json", cfg.json_path, "report JSON path (default stdout)");
  analyze->add_option("--csv", cfg.csv_path, "per-segment verdict CSV path");
  analyze->add_option("--nodes", cfg.nodes_path, "per-node stress CSV path");
  analyze->add_option("--scatter", cfg.scatter_path,
                      "j vs l scatter CSV path (confusion cells)");
  bool no_nodes = false;
  analyze->add_flag("--no-nodes", no_nodes, "omit per-node stresses from the JSON");

  CLI::App* validate = app.add_subcommand(
      "validate", "parse inputs and report structural findings");
  add_common(validate);

  emss::OracleCheckConfig ocfg;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare both engines against the reference solvers");
  oracle->add_option("inputs", cfg.inputs, "input files (.emg or SPICE)");
  oracle->add_option("-t,--tech", cfg.tech_path, "technology parameter file");
  oracle->add_option("--random", ocfg.random_instances,
                     "additionally check N random instances");
  oracle->add_option("--seed", ocfg.seed, "random instance seed");
  oracle->add_option("--max-nodes", ocfg.max_nodes,
                     "largest random instance size");
  oracle->add_option("--corrupt", ocfg.corrupt_factor,
                     "scale one segment's current density (diagnostic)");
  oracle->add_option("--corrupt-segment", ocfg.corrupt_segment,
                     "which segment index to corrupt");

  emss::BenchConfig bcfg;
  CLI::App* bench = app.add_subcommand(
      "bench", "time both engines on synthetic grids of growing size");
  bench->add_option("--sizes", bcfg.sizes, "segment counts to run");
  bench->add_option("--repeats", bcfg.repeats, "timing repetitions (best-of)");
  bench->add_option("--csv", bcfg.csv_path, "timing CSV output path");
  bench->add_option("--seed", bcfg.seed, "grid generator seed");
  bench->add_option("-t,--tech", bcfg.tech_path, "technology parameter file");

  CLI11_PARSE(app, argc, argv);

  if (!pattern.empty()) cfg.naming.pattern = pattern;
  if (unit_m > 0.0) cfg.naming.unit = unit_m;
  cfg.include_nodes = !no_nodes;

  if (analyze->parsed()) return emss::run_analyze(cfg, std::cout, std::cerr);
  if (validate->parsed()) return emss::run_validate(cfg, std::cout, std::cerr);
  if (oracle->parsed()) {
    ocfg.base = cfg;
    return emss::run_oracle_check(ocfg, std::cout, std::cerr);
  }
  if (bench->parsed()) return emss::run_bench(bcfg, std::cout, std::cerr);
  return emss::kExitError;
}
