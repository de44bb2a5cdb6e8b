#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spgraph/graph.hpp"

namespace spgraph {

/// Uniform time grid t_n = n dt, n = 0..steps, dt = T / steps. Fields store every
/// `stride`-th level.
struct TimeGrid {
  double T = 1.0;
  int steps = 2;
  int stride = 1;

  double dt() const { return T / steps; }
  double time(int n) const { return n == steps ? T : n * dt(); }
  int stored_levels() const { return steps / stride + 1; }
  double stored_time(int k) const { return time(k * stride); }
};

/// Smallest grid with dt <= dt_max and an even step count. With snapshots > 0 the step count
/// is a multiple of 2 * snapshots and stride = steps / snapshots, so halving the resolution
/// keeps the stored time levels aligned.
TimeGrid make_time_grid(double T, double dt_max, int snapshots = 0);

/// Same horizon and stored times with half the steps. Requires an even stride (or stride 1
/// and steps divisible by 4).
TimeGrid coarsen(const TimeGrid &tg);

struct EdgeMesh {
  std::size_t edge = 0;
  double length = 1.0;
  int cells = 8;
  double b = 1.0; // stiffness used by the solver on this edge

  double h() const { return length / cells; }
  double x(int j) const { return j == cells ? length : j * h(); }
};

struct Grid {
  std::vector<EdgeMesh> edges;
  TimeGrid time;
  double cfl = 0.9;

  std::size_t slot_of(std::size_t edge) const; // throws if the edge is absent
  std::optional<std::size_t> find_slot(std::size_t edge) const;
  /// Throws CflError unless dt sqrt(b_e) / h_e <= cfl on every edge.
  void check_cfl() const;
  bool same_layout(const Grid &other) const;
};

inline constexpr int kMinCells = 8;

/// Grid over all edges for stiffness eps^(2 m_i); cells chosen as the largest count that keeps
/// dt sqrt(b_e) / h_e <= cfl. eps = 1 selects b = 1 everywhere.
Grid make_direct_grid(const MetricStarGraph &graph, double eps, const TimeGrid &time, double cfl);

/// Grid over the G_0 edges only, b = 1.
Grid make_g0_grid(const MetricStarGraph &graph, const TimeGrid &time, double cfl);

/// Space-time samples per edge plus the shared vertex trace.
///
/// values(slot, j, k): node j of edge slot at stored level k. Node 0 of every edge equals
/// trace()[k * stride] exactly. The trace holds all time steps.
class Field {
public:
  Field() = default;
  explicit Field(Grid grid);

  const Grid &grid() const { return grid_; }
  std::size_t slots() const { return grid_.edges.size(); }
  int levels() const { return grid_.time.stored_levels(); }
  int nodes(std::size_t slot) const { return grid_.edges[slot].cells + 1; }

  double operator()(std::size_t slot, int j, int k) const { return level(slot, k)[j]; }
  double &operator()(std::size_t slot, int j, int k) { return level(slot, k)[j]; }

  std::span<const double> level(std::size_t slot, int k) const;
  std::span<double> level(std::size_t slot, int k);

  const std::vector<double> &trace() const { return trace_; }
  std::vector<double> &trace() { return trace_; }

  /// Shared trace at stored level k.
  double trace_at_level(int k) const { return trace_[static_cast<std::size_t>(k) * grid_.time.stride]; }

private:
  Grid grid_;
  std::vector<std::vector<double>> data_;
  std::vector<double> trace_;
};

/// Cubic Lagrange interpolation of uniform samples y_j = y(j h), j = 0..n-1, at x in
/// [0, (n-1) h]. Exact at nodes.
double interp_cubic(std::span<const double> y, double h, double x);

/// One-sided second-order derivative at node 0 of uniform samples: (-3 y0 + 4 y1 - y2) / (2h).
double one_sided_derivative(std::span<const double> y, double h);

/// Re-sample `src` onto `target` by cubic interpolation in space. Requires the same edges and
/// the same stored times.
Field resample(const Field &src, const Grid &target);

/// CSV with columns tau,t,u for one edge slot; every `node_stride`-th node plus the far end.
void write_field_csv(const Field &fld, std::size_t slot, const std::string &path,
                     int node_stride = 1);
/// CSV with columns t,sigma.
void write_trace_csv(const Field &fld, const std::string &path);

/// "%.17g".
std::string format_g17(double v);

} // namespace spgraph
