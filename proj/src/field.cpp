#include "spgraph/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "spgraph/error.hpp"

namespace spgraph {

TimeGrid make_time_grid(double T, double dt_max, int snapshots) {
  if (!(T > 0.0) || !(dt_max > 0.0))
    throw NumericalError("make_time_grid: T and dt_max must be positive");
  int steps = static_cast<int>(std::ceil(T / dt_max - 1e-12));
  steps = std::max(steps, 2);
  TimeGrid tg;
  tg.T = T;
  if (snapshots > 0) {
    const int block = 2 * snapshots;
    steps = ((steps + block - 1) / block) * block;
    tg.steps = steps;
    tg.stride = steps / snapshots;
  } else {
    steps += steps % 2;
    tg.steps = steps;
    tg.stride = 1;
  }
  return tg;
}

TimeGrid coarsen(const TimeGrid &tg) {
  TimeGrid c = tg;
  if (tg.steps % 2 != 0)
    throw NumericalError("coarsen: odd step count");
  c.steps = tg.steps / 2;
  if (tg.stride > 1) {
    if (tg.stride % 2 != 0)
      throw NumericalError("coarsen: odd stride");
    c.stride = tg.stride / 2;
  } else if (c.steps % 2 != 0) {
    throw NumericalError("coarsen: halved step count must stay even");
  }
  return c;
}

std::optional<std::size_t> Grid::find_slot(std::size_t edge) const {
  for (std::size_t s = 0; s < edges.size(); ++s)
    if (edges[s].edge == edge)
      return s;
  return std::nullopt;
}

std::size_t Grid::slot_of(std::size_t edge) const {
  if (auto s = find_slot(edge))
    return *s;
  throw NumericalError("grid has no edge " + std::to_string(edge));
}

void Grid::check_cfl() const {
  const double dt = time.dt();
  for (const auto &m : edges) {
    const double courant = dt * std::sqrt(m.b) / m.h();
    if (courant > cfl * (1.0 + 1e-12))
      throw CflError("CFL violated on edge " + std::to_string(m.edge) + ": dt sqrt(b)/h = " +
                     std::to_string(courant) + " > " + std::to_string(cfl));
  }
  for (const auto &m : edges)
    if (m.cells < kMinCells)
      throw NumericalError("edge " + std::to_string(m.edge) + " has fewer than " +
                           std::to_string(kMinCells) + " cells");
}

bool Grid::same_layout(const Grid &other) const {
  if (edges.size() != other.edges.size() || time.steps != other.time.steps ||
      time.stride != other.time.stride || time.T != other.time.T)
    return false;
  for (std::size_t s = 0; s < edges.size(); ++s)
    if (edges[s].edge != other.edges[s].edge || edges[s].cells != other.edges[s].cells ||
        edges[s].length != other.edges[s].length)
      return false;
  return true;
}

namespace {

EdgeMesh mesh_for(std::size_t e, double length, double b, const TimeGrid &time, double cfl) {
  EdgeMesh m;
  m.edge = e;
  m.length = length;
  m.b = b;
  const double cells = std::floor(cfl * length / (std::sqrt(b) * time.dt()));
  if (cells > 5e7)
    throw NumericalError("edge " + std::to_string(e) + " would need " + std::to_string(cells) +
                         " cells");
  m.cells = std::max(kMinCells, static_cast<int>(cells));
  return m;
}

} // namespace

Grid make_direct_grid(const MetricStarGraph &graph, double eps, const TimeGrid &time, double cfl) {
  Grid g;
  g.time = time;
  g.cfl = cfl;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const double b = eps == 1.0 ? 1.0 : b_eps(graph, eps, e);
    g.edges.push_back(mesh_for(e, graph.edge(e).length, b, time, cfl));
  }
  return g;
}

Grid make_g0_grid(const MetricStarGraph &graph, const TimeGrid &time, double cfl) {
  Grid g;
  g.time = time;
  g.cfl = cfl;
  for (auto e : graph.edges_in(0))
    g.edges.push_back(mesh_for(e, graph.edge(e).length, 1.0, time, cfl));
  return g;
}

// ---------------------------------------------------------------------------

Field::Field(Grid grid) : grid_(std::move(grid)) {
  const auto levels = static_cast<std::size_t>(grid_.time.stored_levels());
  data_.reserve(grid_.edges.size());
  for (const auto &m : grid_.edges)
    data_.emplace_back(levels * static_cast<std::size_t>(m.cells + 1), 0.0);
  trace_.assign(static_cast<std::size_t>(grid_.time.steps) + 1, 0.0);
}

std::span<const double> Field::level(std::size_t slot, int k) const {
  const auto n = static_cast<std::size_t>(grid_.edges[slot].cells + 1);
  return {data_[slot].data() + static_cast<std::size_t>(k) * n, n};
}

std::span<double> Field::level(std::size_t slot, int k) {
  const auto n = static_cast<std::size_t>(grid_.edges[slot].cells + 1);
  return {data_[slot].data() + static_cast<std::size_t>(k) * n, n};
}

double interp_cubic(std::span<const double> y, double h, double x) {
  const auto n = static_cast<long>(y.size());
  if (n == 0)
    return 0.0;
  const double s = x / h;
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9 && r >= 0 && r <= n - 1)
    return y[static_cast<std::size_t>(r)];
  if (n < 4) {
    const long i = std::clamp(static_cast<long>(std::floor(s)), 0L, n - 2);
    const double w = s - static_cast<double>(i);
    return (1 - w) * y[static_cast<std::size_t>(i)] + w * y[static_cast<std::size_t>(i + 1)];
  }
  const long i = std::clamp(static_cast<long>(std::floor(s)) - 1, 0L, n - 4);
  double out = 0.0;
  for (long a = 0; a < 4; ++a) {
    double w = 1.0;
    for (long b = 0; b < 4; ++b)
      if (b != a)
        w *= (s - static_cast<double>(i + b)) / static_cast<double>(a - b);
    out += w * y[static_cast<std::size_t>(i + a)];
  }
  return out;
}

double one_sided_derivative(std::span<const double> y, double h) {
  if (y.size() < 3)
    throw NumericalError("one-sided derivative needs at least 3 nodes");
  return (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
}

Field resample(const Field &src, const Grid &target) {
  const auto &sg = src.grid();
  if (sg.edges.size() != target.edges.size())
    throw NumericalError("resample: edge sets differ");
  if (sg.time.stored_levels() != target.time.stored_levels() ||
      std::abs(sg.time.T - target.time.T) > 1e-12)
    throw NumericalError("resample: stored time levels differ");
  Field out(target);
  for (std::size_t s = 0; s < target.edges.size(); ++s) {
    if (sg.edges[s].edge != target.edges[s].edge)
      throw NumericalError("resample: edge order differs");
    const double hs = sg.edges[s].h();
    for (int k = 0; k < out.levels(); ++k) {
      const auto from = src.level(s, k);
      auto to = out.level(s, k);
      for (int j = 0; j < out.nodes(s); ++j)
        to[j] = interp_cubic(from, hs, target.edges[s].x(j));
    }
  }
  // Trace at the target's full resolution: cubic in time over the stored source levels where
  // the steps do not line up.
  const auto &tt = target.time;
  const auto &st = sg.time;
  for (int n = 0; n <= tt.steps; ++n) {
    const double t = tt.time(n);
    const double pos = t / st.dt();
    const double r = std::round(pos);
    if (std::abs(pos - r) < 1e-9)
      out.trace()[static_cast<std::size_t>(n)] = src.trace()[static_cast<std::size_t>(r)];
    else
      out.trace()[static_cast<std::size_t>(n)] = interp_cubic(src.trace(), st.dt(), t);
  }
  for (std::size_t s = 0; s < target.edges.size(); ++s)
    for (int k = 0; k < out.levels(); ++k)
      out(s, 0, k) = out.trace_at_level(k);
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(const Field &fld, std::size_t slot, const std::string &path,
                     int node_stride) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw NumericalError("cannot write " + path);
  os << "tau,t,u\n";
  const auto &m = fld.grid().edges[slot];
  for (int k = 0; k < fld.levels(); ++k) {
    const double t = fld.grid().time.stored_time(k);
    const auto row = fld.level(slot, k);
    const int step = std::max(node_stride, 1);
    for (int j = 0; j <= m.cells; j = (j == m.cells || j + step <= m.cells) ? j + step : m.cells)
      os << format_g17(m.x(j)) << ',' << format_g17(t) << ',' << format_g17(row[j]) << '\n';
  }
}

void write_trace_csv(const Field &fld, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw NumericalError("cannot write " + path);
  os << "t,sigma\n";
  const auto &tg = fld.grid().time;
  for (int n = 0; n <= tg.steps; ++n)
    os << format_g17(tg.time(n)) << ',' << format_g17(fld.trace()[static_cast<std::size_t>(n)])
       << '\n';
}

} // namespace spgraph
