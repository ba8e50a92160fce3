#include "emss/screening.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "emss/common.hpp"

namespace emss {

std::vector<bool> exact_verdicts(const InterconnectGraph& graph,
                                 const std::vector<double>& node_stress,
                                 double sigma_crit, std::vector<int>* ties) {
  std::vector<bool> out(graph.segments.size());
  for (const Segment& seg : graph.segments) {
    double peak = std::max(node_stress[seg.from_node], node_stress[seg.to_node]);
    out[seg.id] = peak <= sigma_crit;
    if (peak == sigma_crit && ties != nullptr) ties->push_back(seg.id);
  }
  return out;
}

std::vector<bool> blech_verdicts(const InterconnectGraph& graph, double jl_crit,
                                 std::vector<int>* ties) {
  if (!(jl_crit > 0.0)) throw Error("jl_crit must be positive");
  std::vector<bool> out(graph.segments.size());
  for (const Segment& seg : graph.segments) {
    double jl = std::abs(seg.current_density) * seg.length;
    out[seg.id] = jl <= jl_crit;
    if (jl == jl_crit && ties != nullptr) ties->push_back(seg.id);
  }
  return out;
}

ConfusionCounts compare_verdicts(const std::vector<bool>& exact,
                                 const std::vector<bool>& blech) {
  if (exact.size() != blech.size())
    throw Error("verdict lists cover different segment sets");
  ConfusionCounts c;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (blech[i])
      exact[i] ? ++c.tp : ++c.fp;
    else
      exact[i] ? ++c.fn : ++c.tn;
  }
  return c;
}

std::vector<SegmentVerdict> screen_unit(const InterconnectGraph& graph,
                                        const std::vector<std::string>& names,
                                        const std::vector<double>& node_stress,
                                        double sigma_crit, double jl_crit) {
  if (names.size() != graph.segments.size())
    throw Error("segment name list does not match the unit");
  if (!(jl_crit > 0.0)) throw Error("jl_crit must be positive");

  std::vector<SegmentVerdict> out;
  out.reserve(graph.segments.size());
  for (const Segment& seg : graph.segments) {
    SegmentVerdict v;
    v.segment = seg.id;
    v.name = names[seg.id];
    v.length = seg.length;
    v.abs_j = std::abs(seg.current_density);
    v.jl = v.abs_j * seg.length;
    v.peak_stress = std::max(node_stress[seg.from_node], node_stress[seg.to_node]);
    v.exact_immortal = v.peak_stress <= sigma_crit;
    v.blech_immortal = v.jl <= jl_crit;
    v.boundary_tie = (v.peak_stress == sigma_crit) || (v.jl == jl_crit);
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

nlohmann::ordered_json runtime_or_null(double ms) {
  if (ms < 0.0) return nullptr;
  return ms;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string report_json(const AnalysisReport& report) {
  nlohmann::ordered_json root;
  root["tool"] = report.tool;
  root["config"] = report.config;
  root["timestamp"] = report.timestamp;
  root["units"] = nlohmann::ordered_json::array();
  for (const AnalysisReport::UnitRow& unit : report.units) {
    nlohmann::ordered_json u;
    u["id"] = unit.id;
    u["nodes"] = nlohmann::ordered_json::array();
    for (const AnalysisReport::NodeRow& n : unit.nodes) {
      nlohmann::ordered_json row = {{"name", n.name}, {"stress_pa", n.stress_pa}};
      if (std::isfinite(n.stress_voltage_pa))
        row["stress_voltage_pa"] = n.stress_voltage_pa;
      u["nodes"].push_back(std::move(row));
    }
    u["segments"] = nlohmann::ordered_json::array();
    for (const SegmentVerdict& s : unit.segments) {
      u["segments"].push_back({{"name", s.name},
                               {"jl", s.jl},
                               {"peak_stress_pa", s.peak_stress},
                               {"exact", s.exact_immortal},
                               {"blech", s.blech_immortal},
                               {"cell", s.cell()}});
    }
    root["units"].push_back(std::move(u));
  }
  root["totals"] = {{"tp", report.totals.tp},
                    {"tn", report.totals.tn},
                    {"fp", report.totals.fp},
                    {"fn", report.totals.fn}};
  root["runtimes_ms"] = {{"current", runtime_or_null(report.runtime_current_ms)},
                         {"voltage", runtime_or_null(report.runtime_voltage_ms)},
                         {"dc", runtime_or_null(report.runtime_dc_ms)}};
  return root.dump(2) + "\n";
}

std::string report_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "unit,segment,length_m,j_a_m2,jl_a_m,peak_stress_pa,exact_immortal,"
        "blech_immortal,cell\n";
  for (const AnalysisReport::UnitRow& unit : report.units)
    for (const SegmentVerdict& s : unit.segments)
      os << unit.id << ',' << s.name << ',' << format_double(s.length) << ','
         << format_double(s.abs_j) << ',' << format_double(s.jl) << ','
         << format_double(s.peak_stress) << ',' << (s.exact_immortal ? 1 : 0)
         << ',' << (s.blech_immortal ? 1 : 0) << ',' << s.cell() << '\n';
  return os.str();
}

std::string report_nodes_csv(const AnalysisReport& report) {
  bool both = false;
  for (const AnalysisReport::UnitRow& unit : report.units)
    for (const AnalysisReport::NodeRow& n : unit.nodes)
      both = both || std::isfinite(n.stress_voltage_pa);
  std::ostringstream os;
  os << (both ? "unit,node,stress_pa,stress_voltage_pa\n" : "unit,node,stress_pa\n");
  for (const AnalysisReport::UnitRow& unit : report.units)
    for (const AnalysisReport::NodeRow& n : unit.nodes) {
      os << unit.id << ',' << n.name << ',' << format_double(n.stress_pa);
      if (both) os << ',' << format_double(n.stress_voltage_pa);
      os << '\n';
    }
  return os.str();
}

std::string report_scatter_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "length_m,j_a_m2,jl_a_m,cell\n";
  for (const AnalysisReport::UnitRow& unit : report.units)
    for (const SegmentVerdict& s : unit.segments)
      os << format_double(s.length) << ',' << format_double(s.abs_j) << ','
         << format_double(s.jl) << ',' << s.cell() << '\n';
  return os.str();
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace emss
