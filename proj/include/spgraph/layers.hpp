#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spgraph/field.hpp"

namespace spgraph {

/// Uniform fast-coordinate mesh on [0, L] paired with a time grid. All layers of one run share
/// one LayerGrid.
struct LayerGrid {
  TimeGrid time;
  int cells = 0;
  double h = 0.0;

  double length() const { return cells * h; }
  double xi(int j) const { return j * h; }
  bool operator==(const LayerGrid &o) const {
    return cells == o.cells && h == o.h && time.steps == o.time.steps && time.T == o.time.T;
  }
};

/// Mesh step equal to dt and length at least T + extra.
LayerGrid make_layer_grid(const TimeGrid &time, double extra = 2.0);

/// Samples v(xi_j, t_n) at every time step. A zero layer carries no samples.
class LayerField {
public:
  LayerField() = default;
  explicit LayerField(LayerGrid grid, bool zero = true);

  const LayerGrid &grid() const { return grid_; }
  bool zero() const { return zero_; }

  double operator()(int j, int n) const;
  double &at(int j, int n);
  /// Cubic interpolation in xi at step n; zero beyond L.
  double interpolate(double xi, int n) const;

private:
  LayerGrid grid_;
  bool zero_ = true;
  std::vector<double> values_; // time-major
};

/// c * xi^power * field(xi, t) on the right-hand side.
struct LayerSource {
  double coefficient = 0.0;
  int power = 1;
  const LayerField *field = nullptr;
};

/// d_tt v - d_xixi v + theta v = sum of sources on xi > 0, v(0, t) = trace(t), zero initial
/// data.
struct QuarterPlaneProblem {
  double theta = 0.0;
  std::vector<double> trace; // one value per time step; empty means 0
  std::vector<LayerSource> sources;
};

/// Leapfrog with dt / h <= 1 and theta v averaged over the outer time levels. With h = dt the
/// solution vanishes identically ahead of xi = t. Throws NumericalError when L < T + 2, when a
/// source lives on another grid, or when the trace does not start at rest.
LayerField qp_solve(const QuarterPlaneProblem &prob, const LayerGrid &grid);

/// Same scheme with initial data v(., 0) = alpha, d_t v(., 0) = beta, zero boundary trace and
/// no sources. Used to cross-check the integral representation.
LayerField qp_solve_initial(double theta, const std::function<double(double)> &alpha,
                            const std::function<double(double)> &beta, const LayerGrid &grid);

/// Integral representation of the free solution with initial data alpha, beta, valid for
/// s - t > 0 where the boundary has no influence.
double qp_oracle_below_characteristic(double theta, const std::function<double(double)> &alpha,
                                      const std::function<double(double)> &beta, double s,
                                      double t);

/// (-3 v_0 + 4 v_1 - v_2) / (2h) at every time step.
std::vector<double> boundary_flux(const LayerField &fld);

enum class LayerSide {
  Vertex, // fast coordinate tau / eps^m
  FarEnd  // fast coordinate (length - tau) / eps^m
};

/// Layer value at arclength tau of an edge of the given length, time step n.
double evaluate_physical(const LayerField &fld, LayerSide side, double eps, int m, double length,
                         double tau, int n);
/// Same at an arbitrary time in [0, T], cubic in time between steps.
double evaluate_physical_at(const LayerField &fld, LayerSide side, double eps, int m,
                            double length, double tau, double t);

/// CSV with columns xi,t,v; every `stride`-th time step.
void write_layer_csv(const LayerField &fld, const std::string &path, int stride = 1);

} // namespace spgraph
