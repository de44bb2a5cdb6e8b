#include "spgraph/direct_solver.hpp"

#include <cmath>
#include <string>

#include "spgraph/error.hpp"

namespace spgraph {

namespace {

struct Workspace {
  std::vector<double> prev, cur, next, src;
};

void check_sizes(const Grid &grid, const WaveProblem &p) {
  const auto n = grid.edges.size();
  if (n == 0)
    throw NumericalError("wave problem without edges");
  if (p.b.size() != n || p.q.size() != n || p.phi.size() != n || p.psi.size() != n)
    throw NumericalError("wave problem data does not match the grid");
  for (std::size_t s = 0; s < n; ++s) {
    const auto nodes = static_cast<std::size_t>(grid.edges[s].cells + 1);
    if (p.q[s].size() != nodes || p.phi[s].size() != nodes || p.psi[s].size() != nodes)
      throw NumericalError("wave problem node data does not match edge slot " + std::to_string(s));
  }
  if (!p.kirchhoff.empty() && p.kirchhoff.size() != static_cast<std::size_t>(grid.time.steps) + 1)
    throw NumericalError("Kirchhoff data must have one value per time step");
}

} // namespace

Field integrate_wave(const Grid &grid, const WaveProblem &p) {
  grid.check_cfl();
  check_sizes(grid, p);
  Field fld(grid);
  const auto &tg = grid.time;
  const double dt = tg.dt();
  const double dt2 = dt * dt;
  const std::size_t n_slots = grid.edges.size();

  double vertex_mass = 0.0;
  for (const auto &m : grid.edges)
    vertex_mass += 0.5 * m.h();

  auto nu = [&](int n) { return p.kirchhoff.empty() ? 0.0 : p.kirchhoff[static_cast<std::size_t>(n)]; };
  auto boundary = [&](std::size_t s, double t) { return p.boundary ? p.boundary(s, t) : 0.0; };

  std::vector<Workspace> ws(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    const auto nodes = static_cast<std::size_t>(grid.edges[s].cells + 1);
    ws[s].prev.assign(nodes, 0.0);
    ws[s].cur = p.phi[s];
    ws[s].next.assign(nodes, 0.0);
    ws[s].src.assign(nodes, 0.0);
  }

  // Accumulates b(u_{j+1} - 2u_j + u_{j-1})/h^2 - q u + f into acc[j] for interior nodes and
  // returns the vertex acceleration.
  auto acceleration = [&](int n, double sigma, std::vector<std::vector<double>> &acc) {
    const double t = tg.time(n);
    double vertex = -nu(n);
    for (std::size_t s = 0; s < n_slots; ++s) {
      const auto &m = grid.edges[s];
      const double h = m.h();
      const double c = p.b[s] / (h * h);
      auto &src = ws[s].src;
      if (p.source)
        p.source(s, t, src);
      const auto &u = ws[s].cur;
      const auto &q = p.q[s];
      auto &a = acc[s];
      for (int j = 1; j < m.cells; ++j)
        a[j] = c * (u[j + 1] - 2.0 * u[j] + u[j - 1]) - q[j] * u[j] + (p.source ? src[j] : 0.0);
      vertex += p.b[s] * (u[1] - sigma) / h + 0.5 * h * ((p.source ? src[0] : 0.0) - q[0] * sigma);
    }
    return vertex / vertex_mass;
  };

  std::vector<std::vector<double>> acc(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s)
    acc[s].assign(ws[s].cur.size(), 0.0);

  auto store = [&](int n) {
    fld.trace()[static_cast<std::size_t>(n)] = ws[0].cur[0];
    if (n % tg.stride != 0)
      return;
    const int k = n / tg.stride;
    for (std::size_t s = 0; s < n_slots; ++s) {
      auto row = fld.level(s, k);
      for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = ws[s].cur[j];
    }
  };

  // Level 0: vertex value shared, far ends pinned to the boundary data.
  double sigma = p.phi[0][0];
  for (std::size_t s = 0; s < n_slots; ++s) {
    ws[s].cur[0] = sigma;
    ws[s].cur.back() = boundary(s, 0.0);
  }
  store(0);

  for (int n = 0; n < tg.steps; ++n) {
    const double a_vertex = acceleration(n, sigma, acc);
    double sigma_next = 0.0;
    if (n == 0)
      sigma_next = sigma + dt * p.psi[0][0] + 0.5 * dt2 * a_vertex;
    else
      sigma_next = 2.0 * sigma - ws[0].prev[0] + dt2 * a_vertex;
    const double t_next = tg.time(n + 1);
    for (std::size_t s = 0; s < n_slots; ++s) {
      auto &w = ws[s];
      const int cells = grid.edges[s].cells;
      if (n == 0) {
        for (int j = 1; j < cells; ++j)
          w.next[j] = w.cur[j] + dt * p.psi[s][j] + 0.5 * dt2 * acc[s][j];
      } else {
        for (int j = 1; j < cells; ++j)
          w.next[j] = 2.0 * w.cur[j] - w.prev[j] + dt2 * acc[s][j];
      }
      w.next[0] = sigma_next;
      w.next[cells] = boundary(s, t_next);
      std::swap(w.prev, w.cur);
      std::swap(w.cur, w.next);
    }
    sigma = sigma_next;
    if (!std::isfinite(sigma))
      throw NumericalError("wave solver produced a non-finite vertex value at step " +
                           std::to_string(n + 1));
    store(n + 1);
  }
  return fld;
}

WaveProblem sample_problem(const ProblemSpec &spec, const Grid &grid) {
  WaveProblem p;
  const auto n = grid.edges.size();
  p.b.resize(n);
  p.q.resize(n);
  p.phi.resize(n);
  p.psi.resize(n);
  std::vector<std::vector<double>> xs(n);
  std::vector<std::size_t> edge_of(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto &m = grid.edges[s];
    edge_of[s] = m.edge;
    p.b[s] = m.b;
    for (int j = 0; j <= m.cells; ++j) {
      const double x = m.x(j);
      xs[s].push_back(x);
      p.q[s].push_back(spec.q.value(m.edge, x, 0.0));
      p.phi[s].push_back(spec.phi.value(m.edge, x, 0.0));
      p.psi[s].push_back(spec.psi.value(m.edge, x, 0.0));
    }
  }
  bool has_source = false;
  for (std::size_t s = 0; s < n; ++s)
    if (!spec.f.is_symbolic(edge_of[s]) || !spec.f.expr(edge_of[s]).is_zero())
      has_source = true;
  if (has_source) {
    p.source = [&spec, xs, edge_of](std::size_t s, double t, std::span<double> out) {
      const auto &x = xs[s];
      for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = spec.f.value(edge_of[s], x[j], t);
    };
  }
  p.boundary = [&spec, edge_of](std::size_t s, double t) { return spec.mu_at(edge_of[s], t); };
  return p;
}

Field direct_solve(const ProblemSpec &spec, double eps, const Grid &grid) {
  spec.validate();
  const auto report = check_compatibility_C1(spec);
  if (!report.pass())
    throw CompatibilityError("initial and boundary data are incompatible:\n" + report.to_text());
  Grid g = grid;
  for (auto &m : g.edges)
    m.b = eps == 1.0 ? 1.0 : b_eps(spec, eps, m.edge);
  return integrate_wave(g, sample_problem(spec, g));
}

double energy(const Field &fld, const ProblemSpec &spec, double eps, int k) {
  const auto &g = fld.grid();
  const int levels = fld.levels();
  if (k < 0 || k >= levels)
    throw std::out_of_range("energy: level " + std::to_string(k) + " not stored");
  const double dT = g.time.stride * g.time.dt();
  const double t = g.time.stored_time(k);
  double total = 0.0;
  for (std::size_t s = 0; s < fld.slots(); ++s) {
    const auto &m = g.edges[s];
    const double b = eps == 1.0 ? 1.0 : b_eps(spec, eps, m.edge);
    const double h = m.h();
    const auto u = fld.level(s, k);
    auto ut = [&](int j) {
      if (levels < 3)
        return levels == 2 ? (fld(s, j, 1) - fld(s, j, 0)) / dT : 0.0;
      if (k == 0)
        return (-3.0 * fld(s, j, 0) + 4.0 * fld(s, j, 1) - fld(s, j, 2)) / (2.0 * dT);
      if (k == levels - 1)
        return (3.0 * fld(s, j, k) - 4.0 * fld(s, j, k - 1) + fld(s, j, k - 2)) / (2.0 * dT);
      return (fld(s, j, k + 1) - fld(s, j, k - 1)) / (2.0 * dT);
    };
    auto ux = [&](int j) {
      if (j == 0)
        return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
      if (j == m.cells)
        return (3.0 * u[j] - 4.0 * u[j - 1] + u[j - 2]) / (2.0 * h);
      return (u[j + 1] - u[j - 1]) / (2.0 * h);
    };
    for (int j = 0; j <= m.cells; ++j) {
      const double w = (j == 0 || j == m.cells) ? 0.5 * h : h;
      const double q = spec.q.value(m.edge, m.x(j), t);
      const double v = ut(j);
      const double d = ux(j);
      total += w * (v * v + b * d * d + q * u[j] * u[j]);
    }
  }
  return 0.5 * total;
}

} // namespace spgraph
