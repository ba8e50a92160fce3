#include "emss/dc.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "emss/common.hpp"

namespace emss {

namespace {

constexpr double kUnknownVoltage = std::numeric_limits<double>::quiet_NaN();

struct Grounding {
  std::vector<double> known;  // per node; NaN when unknown
  int known_count = 0;
};

// Fix ground, then propagate fixed voltages through voltage sources until no
// source has exactly one fixed terminal. Whatever sources remain need MNA rows.
Grounding propagate_known_voltages(const Netlist& net,
                                   std::vector<const SourceCard*>* mna_sources) {
  Grounding g;
  g.known.assign(net.node_count(), kUnknownVoltage);

  int ground = net.node_index(kGroundName);
  if (ground < 0 && !net.voltage_sources.empty())
    ground = net.node_index(net.voltage_sources.front().node_b);
  if (ground >= 0) {
    g.known[ground] = 0.0;
    g.known_count = 1;
  }

  std::vector<const SourceCard*> pending;
  for (const SourceCard& s : net.voltage_sources) pending.push_back(&s);

  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<const SourceCard*> next;
    for (const SourceCard* s : pending) {
      int a = net.node_index(s->node_a);
      int b = net.node_index(s->node_b);
      bool ka = !std::isnan(g.known[a]);
      bool kb = !std::isnan(g.known[b]);
      if (ka && kb) {
        if (std::abs((g.known[a] - g.known[b]) - s->value) >
            1e-9 * (1.0 + std::abs(s->value)))
          throw Error("inconsistent voltage sources around node " + s->node_a);
        progress = true;
      } else if (ka) {
        g.known[b] = g.known[a] - s->value;
        ++g.known_count;
        progress = true;
      } else if (kb) {
        g.known[a] = g.known[b] + s->value;
        ++g.known_count;
        progress = true;
      } else {
        next.push_back(s);
      }
    }
    pending.swap(next);
  }
  *mna_sources = std::move(pending);
  return g;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

DcSolution solve_dc(const Netlist& net, const DcOptions& options) {
  DcSolution sol;
  sol.node_voltage.assign(net.node_count(), 0.0);
  sol.resistor_current.assign(net.resistors.size(), 0.0);
  if (net.node_count() == 0) return sol;

  for (const ResistorCard& r : net.resistors) {
    if (!(r.ohms > 0.0))
      throw Error("non-positive resistance on element " + r.name +
                  " (collapse shorts before solving)");
  }

  std::vector<const SourceCard*> mna_sources;
  Grounding grounding = propagate_known_voltages(net, &mna_sources);
  if (grounding.known_count == 0)
    throw Error("network has no voltage source or grounded node");

  // Every connected component (resistors + voltage sources) must reach a
  // node with a fixed voltage, otherwise its potentials are undefined.
  DisjointSet components(net.node_count());
  for (const ResistorCard& r : net.resistors)
    components.unite(net.node_index(r.node_a), net.node_index(r.node_b));
  for (const SourceCard& s : net.voltage_sources)
    components.unite(net.node_index(s.node_a), net.node_index(s.node_b));
  std::vector<char> component_grounded(net.node_count(), 0);
  for (int i = 0; i < net.node_count(); ++i)
    if (!std::isnan(grounding.known[i]))
      component_grounded[components.find(i)] = 1;
  for (int i = 0; i < net.node_count(); ++i) {
    if (!component_grounded[components.find(i)])
      throw Error("floating subnetwork (node " + net.node_names()[i] + ")");
  }

  // Unknown numbering
  std::vector<int> unknown_of(net.node_count(), -1);
  int n_unknown = 0;
  for (int i = 0; i < net.node_count(); ++i)
    if (std::isnan(grounding.known[i])) unknown_of[i] = n_unknown++;

  const int n_extra = static_cast<int>(mna_sources.size());
  const int dim = n_unknown + n_extra;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  double residual = 0.0;

  if (dim > 0) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(net.resistors.size() * 4 + mna_sources.size() * 4);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

    for (const ResistorCard& r : net.resistors) {
      int a = net.node_index(r.node_a);
      int b = net.node_index(r.node_b);
      double g = 1.0 / r.ohms;
      int ua = unknown_of[a];
      int ub = unknown_of[b];
      if (ua >= 0) {
        trips.emplace_back(ua, ua, g);
        if (ub >= 0)
          trips.emplace_back(ua, ub, -g);
        else
          rhs[ua] += g * grounding.known[b];
      }
      if (ub >= 0) {
        trips.emplace_back(ub, ub, g);
        if (ua >= 0)
          trips.emplace_back(ub, ua, -g);
        else
          rhs[ub] += g * grounding.known[a];
      }
    }
    for (const SourceCard& s : net.current_sources) {
      int a = unknown_of[net.node_index(s.node_a)];
      int b = unknown_of[net.node_index(s.node_b)];
      if (a >= 0) rhs[a] -= s.value;
      if (b >= 0) rhs[b] += s.value;
    }
    for (int k = 0; k < n_extra; ++k) {
      const SourceCard& s = *mna_sources[k];
      int a = unknown_of[net.node_index(s.node_a)];
      int b = unknown_of[net.node_index(s.node_b)];
      int row = n_unknown + k;
      // branch current leaves node_a, enters node_b
      if (a >= 0) {
        trips.emplace_back(a, row, 1.0);
        trips.emplace_back(row, a, 1.0);
      }
      if (b >= 0) {
        trips.emplace_back(b, row, -1.0);
        trips.emplace_back(row, b, -1.0);
      }
      rhs[row] = s.value;
    }

    Eigen::SparseMatrix<double> A(dim, dim);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    if (n_extra > 0) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success)
        throw Error("singular system in DC solve");
      x = lu.solve(rhs);
    } else if (dim <= options.direct_limit) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
      ldlt.compute(A);
      if (ldlt.info() != Eigen::Success)
        throw Error("singular system in DC solve");
      x = ldlt.solve(rhs);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                               Eigen::Lower | Eigen::Upper>
          cg;
      cg.setTolerance(options.tolerance * 1e-2);
      cg.setMaxIterations(options.max_iterations);
      cg.compute(A);
      x = cg.solve(rhs);
      if (cg.info() != Eigen::Success)
        throw Error("iterative DC solve did not converge (residual " +
                    std::to_string(cg.error()) + ")");
    }

    double bnorm = rhs.norm();
    residual = bnorm > 0.0 ? (A * x - rhs).norm() / bnorm : 0.0;
    if (!(residual <= options.tolerance))
      throw Error("DC solve residual " + std::to_string(residual) +
                  " exceeds tolerance");
  }

  for (int i = 0; i < net.node_count(); ++i)
    sol.node_voltage[i] =
        std::isnan(grounding.known[i]) ? x[unknown_of[i]] : grounding.known[i];
  for (size_t i = 0; i < net.resistors.size(); ++i) {
    const ResistorCard& r = net.resistors[i];
    sol.resistor_current[i] = (sol.node_voltage[net.node_index(r.node_a)] -
                               sol.node_voltage[net.node_index(r.node_b)]) /
                              r.ohms;
  }
  sol.residual_norm = residual;
  return sol;
}

double verify_solution(const Netlist& net, const DcSolution& dc) {
  if (static_cast<int>(dc.node_voltage.size()) != net.node_count())
    throw Error("DC solution does not cover every node");

  std::vector<char> source_attached(net.node_count(), 0);
  int ground = net.node_index(kGroundName);
  if (ground >= 0) source_attached[ground] = 1;
  for (const SourceCard& s : net.current_sources) {
    source_attached[net.node_index(s.node_a)] = 1;
    source_attached[net.node_index(s.node_b)] = 1;
  }
  for (const SourceCard& s : net.voltage_sources) {
    source_attached[net.node_index(s.node_a)] = 1;
    source_attached[net.node_index(s.node_b)] = 1;
  }

  std::vector<KahanSum> inflow(net.node_count());
  for (size_t i = 0; i < net.resistors.size(); ++i) {
    const ResistorCard& r = net.resistors[i];
    if (!(r.ohms > 0.0)) {
      // current through a short is not derivable from voltages
      source_attached[net.node_index(r.node_a)] = 1;
      source_attached[net.node_index(r.node_b)] = 1;
      continue;
    }
    double current = (dc.node_voltage[net.node_index(r.node_a)] -
                      dc.node_voltage[net.node_index(r.node_b)]) /
                     r.ohms;
    inflow[net.node_index(r.node_a)].add(-current);
    inflow[net.node_index(r.node_b)].add(current);
  }

  double worst = 0.0;
  for (int i = 0; i < net.node_count(); ++i) {
    if (source_attached[i]) continue;
    worst = std::max(worst, std::abs(inflow[i].value()));
  }
  return worst;
}

DcSolution import_voltages(const Netlist& net, const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open voltage file: " + csv_path);

  std::unordered_map<std::string, double> volts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("expected `name,volts`", lineno);
    std::string name = line.substr(0, comma);
    if (lineno == 1 && name == "name") continue;  // optional header
    try {
      volts[name] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("invalid voltage for node " + name, lineno);
    }
  }

  DcSolution sol;
  sol.node_voltage.assign(net.node_count(), 0.0);
  for (int i = 0; i < net.node_count(); ++i) {
    const std::string& name = net.node_names()[i];
    auto it = volts.find(name);
    if (it == volts.end()) {
      if (name == kGroundName) continue;  // implicit 0
      throw Error("imported voltages missing node " + name);
    }
    sol.node_voltage[i] = it->second;
  }
  sol.resistor_current.assign(net.resistors.size(), 0.0);
  for (size_t i = 0; i < net.resistors.size(); ++i) {
    const ResistorCard& r = net.resistors[i];
    if (!(r.ohms > 0.0)) continue;
    sol.resistor_current[i] = (sol.node_voltage[net.node_index(r.node_a)] -
                               sol.node_voltage[net.node_index(r.node_b)]) /
                              r.ohms;
  }
  sol.residual_norm = 0.0;
  return sol;
}

}  // namespace emss
