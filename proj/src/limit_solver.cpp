#include "spgraph/limit_solver.hpp"

#include <cmath>
#include <string>

#include "spgraph/error.hpp"
#include "spgraph/kernels.hpp"

namespace spgraph {

CompatibilityReport check_compatibility_g0(const G0Problem &prob, double tol) {
  const auto &spec = prob.spec;
  CompatibilityReport rep;
  if (tol < 0.0)
    tol = prob.tol;
  rep.tol = tol < 0.0 ? default_compatibility_tol(spec) : tol;
  auto add = [&](std::string name, std::string where, double r) {
    rep.conditions.push_back({std::move(name), std::move(where), std::abs(r), std::abs(r) <= rep.tol});
  };
  const double nu0 = prob.nu.empty() ? 0.0 : prob.nu.front();
  const auto g0 = spec.graph.edges_in(0);
  if (prob.homogeneous) {
    add("sum phi'_e(a) = nu(0)", "G_0", nu0);
    return rep;
  }
  double flux = 0.0;
  for (auto e : g0) {
    const double l = spec.length(e);
    const std::string where = "a_" + std::to_string(e + 1) + " (edge " + std::to_string(e) + ")";
    add("phi(a_j) = mu(a_j,0)", where, spec.phi.value(e, l, 0.0) - spec.mu_at(e, 0.0));
    add("psi(a_j) = d_t mu(a_j,0)", where,
        spec.psi.value(e, l, 0.0) - spec.mu.derivative(e, Var::T, 1, l, 0.0, 0.0, l));
    flux += spec.phi.derivative(e, Var::X, 1, 0.0, 0.0, 0.0, l);
  }
  add("sum phi'_e(a) = nu(0)", "G_0", flux - nu0);
  return rep;
}

Field solve_g0(const G0Problem &prob, const Grid &grid) {
  prob.spec.validate();
  const auto report = check_compatibility_g0(prob);
  if (!report.pass())
    throw CompatibilityError("G_0 problem data are incompatible:\n" + report.to_text());
  Grid g = grid;
  for (auto &m : g.edges) {
    if (prob.spec.graph.degenerate(m.edge))
      throw NumericalError("solve_g0: edge " + std::to_string(m.edge) + " is not in G_0");
    m.b = 1.0;
  }
  WaveProblem wp;
  if (prob.homogeneous) {
    for (const auto &m : g.edges) {
      const auto nodes = static_cast<std::size_t>(m.cells + 1);
      wp.b.push_back(1.0);
      std::vector<double> q(nodes);
      for (int j = 0; j <= m.cells; ++j)
        q[static_cast<std::size_t>(j)] = prob.spec.q.value(m.edge, m.x(j), 0.0);
      wp.q.push_back(std::move(q));
      wp.phi.emplace_back(nodes, 0.0);
      wp.psi.emplace_back(nodes, 0.0);
    }
  } else {
    wp = sample_problem(prob.spec, g);
  }
  wp.kirchhoff = prob.nu;
  return integrate_wave(g, wp);
}

// ---------------------------------------------------------------------------

double EdgeODESolution::operator()(int j, int n) const {
  if (zero)
    return 0.0;
  return values[static_cast<std::size_t>(n) * static_cast<std::size_t>(cells + 1) +
                static_cast<std::size_t>(j)];
}

double EdgeODESolution::at(double xq, int n) const {
  if (zero)
    return 0.0;
  const auto stride = static_cast<std::size_t>(cells + 1);
  return interp_cubic({values.data() + static_cast<std::size_t>(n) * stride, stride}, h(), xq);
}

double EdgeODESolution::dx_at_vertex(int n) const {
  if (zero)
    return 0.0;
  return (-3.0 * (*this)(0, n) + 4.0 * (*this)(1, n) - (*this)(2, n)) / (2.0 * h());
}

EdgeODESolution zero_edge_solution(std::size_t edge, int order, double length, int cells,
                                   const TimeGrid &time) {
  EdgeODESolution out;
  out.edge = edge;
  out.order = order;
  out.length = length;
  out.cells = cells;
  out.time = time;
  out.zero = true;
  return out;
}

std::vector<double> convolve(const std::vector<double> &g, const std::vector<double> &kernel,
                             double dt) {
  const std::size_t m = g.size();
  if (kernel.size() < m)
    throw NumericalError("convolve: kernel shorter than data");
  std::vector<double> out(m, 0.0);
  auto term = [&](std::size_t i, std::size_t n) { return g[i] * kernel[n - i]; };
  for (std::size_t n = 1; n < m; ++n) {
    if (n == 1) {
      out[n] = 0.5 * dt * (term(0, 1) + term(1, 1));
      continue;
    }
    const std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
    double acc = 0.0;
    if (simpson_end > 0) {
      double s = term(0, n) + term(simpson_end, n);
      for (std::size_t i = 1; i < simpson_end; ++i)
        s += (i % 2 == 1 ? 4.0 : 2.0) * term(i, n);
      acc += s * dt / 3.0;
    }
    if (n % 2 == 1) {
      const std::size_t i0 = n - 3;
      acc += 3.0 * dt / 8.0 *
             (term(i0, n) + 3.0 * term(i0 + 1, n) + 3.0 * term(i0 + 2, n) + term(i0 + 3, n));
    }
    out[n] = acc;
  }
  return out;
}

void second_derivative(const double *u, int nodes, double h, double *out) {
  if (nodes < 6)
    throw NumericalError("second_derivative needs at least 6 nodes");
  const double c = 1.0 / (12.0 * h * h);
  const int last = nodes - 1;
  auto edge0 = [&](auto f) {
    return c * (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4) -
                10.0 * f(5));
  };
  auto edge1 = [&](auto f) {
    return c * (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5));
  };
  auto fwd = [&](int i) { return u[i]; };
  auto bwd = [&](int i) { return u[last - i]; };
  out[0] = edge0(fwd);
  out[1] = edge1(fwd);
  out[last] = edge0(bwd);
  out[last - 1] = edge1(bwd);
  for (int j = 2; j <= last - 2; ++j)
    out[j] = c * (-u[j - 2] + 16.0 * u[j - 1] - 30.0 * u[j] + 16.0 * u[j + 1] - u[j + 2]);
}

namespace {

std::vector<double> sn_kernel(double q, const TimeGrid &tg) {
  std::vector<double> k(static_cast<std::size_t>(tg.steps) + 1);
  for (int n = 0; n <= tg.steps; ++n)
    k[static_cast<std::size_t>(n)] = kernels::sn(q, tg.time(n));
  return k;
}

bool is_zero_datum(const GraphFunction &g, std::size_t e) {
  return g.is_symbolic(e) && g.expr(e).is_zero();
}

} // namespace

EdgeODESolution solve_degenerate_edge(const ProblemSpec &spec, std::size_t e, int cells,
                                      const TimeGrid &tg) {
  if (!spec.graph.degenerate(e))
    throw NumericalError("solve_degenerate_edge: edge " + std::to_string(e) + " is in G_0");
  if (cells < 5)
    throw NumericalError("solve_degenerate_edge: too few cells");
  auto out = zero_edge_solution(e, 0, spec.length(e), cells, tg);
  if (is_zero_datum(spec.phi, e) && is_zero_datum(spec.psi, e) && is_zero_datum(spec.f, e))
    return out;
  out.zero = false;
  const auto nodes = static_cast<std::size_t>(cells + 1);
  const auto steps = static_cast<std::size_t>(tg.steps) + 1;
  out.values.assign(nodes * steps, 0.0);
  const bool forced = !is_zero_datum(spec.f, e);
  std::vector<double> fs(steps);
  for (int j = 0; j <= cells; ++j) {
    const double x = out.x(j);
    const double q = spec.q.value(e, x, 0.0);
    const double phi = spec.phi.value(e, x, 0.0);
    const double psi = spec.psi.value(e, x, 0.0);
    std::vector<double> conv;
    if (forced) {
      for (std::size_t n = 0; n < steps; ++n)
        fs[n] = spec.f.value(e, x, tg.time(static_cast<int>(n)));
      conv = convolve(fs, sn_kernel(q, tg), tg.dt());
    }
    for (std::size_t n = 0; n < steps; ++n) {
      const double t = tg.time(static_cast<int>(n));
      double v = phi * kernels::cs(q, t) + psi * kernels::sn(q, t);
      if (forced)
        v += conv[n];
      out.values[n * nodes + static_cast<std::size_t>(j)] = v;
    }
  }
  return out;
}

EdgeODESolution solve_cauchy_recursive(const ProblemSpec &spec, std::size_t e,
                                       const EdgeODESolution &prev, int s) {
  if (s < 2)
    throw NumericalError("solve_cauchy_recursive: order must be at least 2");
  if (prev.order != s - 2 || prev.edge != e)
    throw NumericalError("solve_cauchy_recursive: expected the order " + std::to_string(s - 2) +
                         " solution on edge " + std::to_string(e));
  auto out = zero_edge_solution(e, s, prev.length, prev.cells, prev.time);
  if (s % 2 == 1 || prev.zero)
    return out;
  const auto &tg = prev.time;
  const int cells = prev.cells;
  const auto nodes = static_cast<std::size_t>(cells + 1);
  const auto steps = static_cast<std::size_t>(tg.steps) + 1;
  std::vector<double> d2(nodes * steps);
  for (std::size_t n = 0; n < steps; ++n)
    second_derivative(prev.values.data() + n * nodes, cells + 1, prev.h(), d2.data() + n * nodes);
  out.zero = false;
  out.values.assign(nodes * steps, 0.0);
  std::vector<double> g(steps);
  for (std::size_t j = 0; j < nodes; ++j) {
    for (std::size_t n = 0; n < steps; ++n)
      g[n] = d2[n * nodes + j];
    const double q = spec.q.value(e, out.x(static_cast<int>(j)), 0.0);
    const auto conv = convolve(g, sn_kernel(q, tg), tg.dt());
    for (std::size_t n = 0; n < steps; ++n)
      out.values[n * nodes + j] = conv[n];
  }
  return out;
}

const std::vector<double> &vertex_trace(const Field &fld) { return fld.trace(); }

} // namespace spgraph
