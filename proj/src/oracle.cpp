#include "emss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "emss/common.hpp"
#include "emss/topology.hpp"

namespace emss {

std::vector<double> dense_solve(const InterconnectGraph& graph, double beta,
                                double sigma_thermal) {
  const int n = graph.node_count();
  if (n > 5000) throw Error("dense oracle is limited to 5000 nodes");
  if (n == 0) throw Error("dense oracle needs a non-empty graph");

  SpanningTree tree = build_spanning_tree(graph);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  int row = 0;
  for (int node : tree.order) {
    if (node == tree.root) continue;
    const Segment& seg = graph.segments[tree.parent_segment[node]];
    A(row, seg.to_node) += 1.0;
    A(row, seg.from_node) -= 1.0;
    b(row) = -beta * seg.current_density * seg.length;
    ++row;
  }
  if (row != n - 1) throw Error("dense oracle: tree row count mismatch");

  double volume = 0.0;
  for (const Segment& seg : graph.segments)
    volume += seg.width * seg.height * seg.length;
  if (!(volume > 0.0)) throw Error("dense oracle: unit has no metal volume");
  for (const Segment& seg : graph.segments) {
    double v = seg.width * seg.height * seg.length;
    A(row, seg.from_node) += v / volume;
    b(row) += v / volume * beta * seg.current_density * seg.length * 0.5;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd x = lu.solve(b);

  double scale = A.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() +
                 b.cwiseAbs().maxCoeff();
  double residual = (A * x - b).cwiseAbs().maxCoeff();
  if (!(scale >= 0.0) || !std::isfinite(residual) ||
      residual > 1e-10 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "dense oracle residual " << residual
        << " too large; the system is singular or badly conditioned";
    throw Error(msg.str());
  }

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = x(i) + sigma_thermal;
  return out;
}

TransientResult transient_steady_state(const InterconnectGraph& graph,
                                       const DerivedConstants& constants,
                                       double sigma_thermal,
                                       const TransientOptions& options) {
  const int n = graph.node_count();
  const int m = graph.segment_count();
  const int M = options.cells_per_segment;
  if (m == 0 || n == 0) throw Error("transient oracle needs a non-empty graph");
  if (m > 50) throw Error("transient oracle is limited to 50 segments");
  if (M < 8) throw Error("transient oracle needs at least 8 cells per segment");

  const double kappa = constants.kappa;
  const double beta = constants.beta;

  const int cell_total = m * M;
  const int unknowns = cell_total + n;
  auto cell_index = [M](int seg, int i) { return seg * M + i; };
  auto node_index = [cell_total](int node) { return cell_total + node; };

  std::vector<double> dx(m), drift(m);
  double tau_min = 1e300, tau_max = 0.0, max_j = 0.0;
  for (const Segment& seg : graph.segments) {
    dx[seg.id] = seg.length / M;
    drift[seg.id] = beta * seg.current_density;  // steady slope is -drift
    double tau = seg.length * seg.length / kappa;
    tau_min = std::min(tau_min, tau);
    tau_max = std::max(tau_max, tau);
    max_j = std::max(max_j, std::abs(seg.current_density));
  }

  double total_volume = 0.0;
  for (const Segment& seg : graph.segments)
    total_volume += seg.width * seg.height * seg.length;

  Eigen::VectorXd state = Eigen::VectorXd::Zero(unknowns);

  // One linear system per time step:
  //   cells:  sigma_new - (dt/dx) * (F_right - F_left) = sigma_old
  //   nodes:  width-weighted flux balance = 0 (algebraic)
  // Rows are normalized by their largest coefficient so the direct solver
  // sees a well-scaled matrix.
  Eigen::SparseMatrix<double> sys(unknowns, unknowns);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;

  // The RHS depends on the previous state, so split the assembly: the
  // matrix and the constant part of the RHS are rebuilt when dt changes and
  // the sigma_old part is refreshed every step. Row scales are kept so both
  // parts stay consistent.
  std::vector<double> row_scale(unknowns, 1.0);
  Eigen::VectorXd rhs_const = Eigen::VectorXd::Zero(unknowns);

  auto assemble = [&](double dt) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(cell_total) * 4 + n * 8);
    rhs_const.setZero();

    std::vector<std::vector<std::pair<int, double>>> rows(unknowns);
    std::vector<double> rhs_row(unknowns, 0.0);
    auto add = [&rows](int row, int col, double v) { rows[row].emplace_back(col, v); };

    for (const Segment& seg : graph.segments) {
      int k = seg.id;
      double r = dt * kappa / (dx[k] * dx[k]);
      for (int i = 0; i < M; ++i) {
        int row = cell_index(k, i);
        add(row, row, 1.0);
        // left face
        if (i == 0) {
          add(row, row, 2.0 * r);
          add(row, node_index(seg.from_node), -2.0 * r);
        } else {
          add(row, row, r);
          add(row, cell_index(k, i - 1), -r);
        }
        // right face
        if (i == M - 1) {
          add(row, row, 2.0 * r);
          add(row, node_index(seg.to_node), -2.0 * r);
        } else {
          add(row, row, r);
          add(row, cell_index(k, i + 1), -r);
        }
      }
      // Node flux balances. F(0) leaves the from node, F(l) enters the to
      // node; each face uses the half-cell spacing dx/2.
      double wh = seg.width * seg.height;
      double c = wh * kappa * 2.0 / dx[k];
      int from_row = node_index(seg.from_node);
      int to_row = node_index(seg.to_node);
      add(from_row, node_index(seg.from_node), c);
      add(from_row, cell_index(k, 0), -c);
      rhs_row[from_row] += wh * kappa * drift[k];
      add(to_row, node_index(seg.to_node), c);
      add(to_row, cell_index(k, M - 1), -c);
      rhs_row[to_row] -= wh * kappa * drift[k];
    }

    for (int row = 0; row < unknowns; ++row) {
      double scale = std::abs(rhs_row[row]);
      for (auto& [c, v] : rows[row]) scale = std::max(scale, std::abs(v));
      if (scale == 0.0) scale = 1.0;
      row_scale[row] = scale;
      for (auto& [c, v] : rows[row]) triplets.emplace_back(row, c, v / scale);
      rhs_const(row) = rhs_row[row] / scale;
    }

    sys.setZero();
    sys.resize(unknowns, unknowns);
    sys.setFromTriplets(triplets.begin(), triplets.end());
    sys.makeCompressed();
    solver.compute(sys);
    if (solver.info() != Eigen::Success)
      throw Error("transient oracle: time-step system factorization failed");
  };

  auto mass_residual = [&](const Eigen::VectorXd& v) {
    KahanSum mass;
    double peak = 0.0;
    for (const Segment& seg : graph.segments) {
      double whdx = seg.width * seg.height * dx[seg.id];
      for (int i = 0; i < M; ++i) {
        double s = v(cell_index(seg.id, i));
        mass.add(whdx * s);
        peak = std::max(peak, std::abs(s));
      }
    }
    double scale = total_volume * peak;
    return scale > 0.0 ? std::abs(mass.value()) / scale : std::abs(mass.value());
  };

  TransientResult result;
  double dt = tau_min / (M * M) * 10.0;
  double dt_cap = tau_max;
  assemble(dt);

  Eigen::VectorXd rhs(unknowns), next(unknowns);
  double rel_change = 1e300;
  for (long step = 0; step < options.max_steps; ++step) {
    rhs = rhs_const;
    for (int i = 0; i < cell_total; ++i) rhs(i) += state(i) / row_scale[i];

    next = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !next.allFinite())
      throw Error("transient oracle: time-step solve failed");

    double max_abs = next.cwiseAbs().maxCoeff();
    double max_delta = (next - state).cwiseAbs().maxCoeff();
    rel_change = max_delta / dt * tau_max / std::max(max_abs, 1e-300);
    if (max_abs == 0.0) rel_change = 0.0;

    state.swap(next);
    result.elapsed_time += dt;
    result.steps = step + 1;
    result.max_mass_residual = std::max(result.max_mass_residual, mass_residual(state));

    if (rel_change < options.rel_change_tol) break;
    if (dt < dt_cap) {
      dt = std::min(dt * 1.4, dt_cap);
      assemble(dt);
    }
  }
  result.final_rel_change = rel_change;
  if (rel_change >= options.rel_change_tol) {
    std::ostringstream msg;
    msg << "transient oracle did not reach steady state in " << options.max_steps
        << " steps (relative change " << rel_change << ", time "
        << result.elapsed_time << " s)";
    throw Error(msg.str());
  }

  // Zero-flux check at degree-1 nodes.
  double worst_flux = 0.0;
  for (int v = 0; v < n; ++v) {
    if (graph.degree(v) != 1) continue;
    const Segment& seg = graph.segments[graph.adj_begin(v)->segment()];
    double flux;
    if (seg.from_node == v) {
      flux = kappa * ((state(cell_index(seg.id, 0)) - state(node_index(v))) *
                          2.0 / dx[seg.id] +
                      drift[seg.id]);
    } else {
      flux = kappa * ((state(node_index(v)) - state(cell_index(seg.id, M - 1))) *
                          2.0 / dx[seg.id] +
                      drift[seg.id]);
    }
    worst_flux = std::max(worst_flux, std::abs(flux));
  }
  double flux_scale = kappa * beta * max_j;
  result.terminus_flux_residual =
      flux_scale > 0.0 ? worst_flux / flux_scale : worst_flux;

  result.node_stress.resize(n);
  for (int v = 0; v < n; ++v)
    result.node_stress[v] = state(node_index(v)) + sigma_thermal;
  return result;
}

}  // namespace emss
