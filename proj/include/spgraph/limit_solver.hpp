#pragma once

#include <cstddef>
#include <vector>

#include "spgraph/direct_solver.hpp"
#include "spgraph/field.hpp"
#include "spgraph/graph.hpp"

namespace spgraph {

/// Wave problem on the G_0 edges with b = 1 and Kirchhoff data
///   sum_{e in G_0} d_x u_e(a, t) = nu(t).
struct G0Problem {
  ProblemSpec spec;         // q always used; phi, psi, f, mu only when !homogeneous
  bool homogeneous = false; // zero initial, boundary and source data
  std::vector<double> nu;   // one value per time step; empty means nu = 0
  double tol = -1.0;        // compatibility tolerance; negative selects the default
};

/// Boundary matching, and sum phi'_e(a) = nu(0) over G_0. Continuity of phi, psi at the vertex
/// is checked by ProblemSpec::validate. A negative tol falls back to prob.tol, then to the
/// default.
CompatibilityReport check_compatibility_g0(const G0Problem &prob, double tol = -1.0);

/// Same scheme as direct_solve on a G_0-only grid. Throws CompatibilityError, CflError.
Field solve_g0(const G0Problem &prob, const Grid &grid);

/// Regular term u_s on one degenerate edge: values on a uniform mesh of [0, length] at every
/// time step. A zero solution carries no samples.
struct EdgeODESolution {
  std::size_t edge = 0;
  int order = 0;
  double length = 1.0;
  int cells = 0;
  TimeGrid time;
  bool zero = true;
  std::vector<double> values; // time-major: values[n * (cells + 1) + j]

  double h() const { return length / cells; }
  double x(int j) const { return j == cells ? length : j * h(); }
  /// u at node j, time step n. Zero for a zero solution.
  double operator()(int j, int n) const;
  /// Cubic interpolation in x at time step n.
  double at(double x, int n) const;
  /// One-sided second-order d_x u at the central vertex.
  double dx_at_vertex(int n) const;
  double at_far_end(int n) const { return (*this)(cells, n); }
};

EdgeODESolution zero_edge_solution(std::size_t edge, int order, double length, int cells,
                                   const TimeGrid &time);

/// u_0 = phi cs(q, t) + psi sn(q, t) + int_0^t f(x, s) sn(q, t - s) ds node by node.
EdgeODESolution solve_degenerate_edge(const ProblemSpec &spec, std::size_t e, int cells,
                                      const TimeGrid &time);

/// u_s = int_0^t d_xx u_{s-2}(x, s') sn(q, t - s') ds' from the solution of order s - 2.
/// Odd s gives the zero solution. Throws NumericalError when s - 2 does not match prev.
EdgeODESolution solve_cauchy_recursive(const ProblemSpec &spec, std::size_t e,
                                       const EdgeODESolution &prev, int s);

/// int_0^{t_n} g(s) k(t_n - s) ds for n = 0..M with samples g_i, k_i on a uniform grid:
/// composite Simpson, the 3/8 rule on the last three intervals when n is odd, trapezoid for n = 1.
std::vector<double> convolve(const std::vector<double> &g, const std::vector<double> &kernel,
                             double dt);

/// Fourth-order d_xx on a uniform mesh (five-point centred, six-point one-sided near the
/// ends). Needs at least 6 nodes.
void second_derivative(const double *u, int nodes, double h, double *out);

/// The shared vertex samples of a field.
const std::vector<double> &vertex_trace(const Field &fld);

} // namespace spgraph
