#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spgraph/field.hpp"
#include "spgraph/graph.hpp"

namespace spgraph {

/// Node-sampled data for the lumped leapfrog scheme
///   d_tt u - b_e d_xx u + q u = f on each edge slot,
///   sum_e b_e d_x u_e(a) = nu(t) at the shared vertex,
///   u = boundary(slot, t) at the far end of each edge.
struct WaveProblem {
  std::vector<double> b;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> psi;
  /// Fills out[j] = f(x_j, t) on a slot. Empty means f = 0.
  std::function<void(std::size_t slot, double t, std::span<double> out)> source;
  /// Dirichlet value at the far end. Empty means 0.
  std::function<double(std::size_t slot, double t)> boundary;
  /// nu at every time step (steps + 1 values). Empty means 0.
  std::vector<double> kirchhoff;
};

/// Runs the explicit scheme on `grid`. Throws CflError, NumericalError on non-finite values.
Field integrate_wave(const Grid &grid, const WaveProblem &problem);

/// Samples q, phi, psi, f, mu of `spec` on the grid's edges with stiffness b from the grid.
WaveProblem sample_problem(const ProblemSpec &spec, const Grid &grid);

/// Reference solution for stiffness eps^(2 m_i). The grid's b values are replaced by the ones
/// implied by eps; eps = 1 gives b = 1 on every edge. Throws CompatibilityError when the C1
/// conditions fail, CflError when the grid is too coarse for the stiffness.
Field direct_solve(const ProblemSpec &spec, double eps, const Grid &grid);

/// Discrete energy at stored level k.
double energy(const Field &fld, const ProblemSpec &spec, double eps, int k);

} // namespace spgraph
