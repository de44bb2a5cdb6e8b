#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "spgraph/error.hpp"
#include "spgraph/limit_solver.hpp"

using namespace spgraph;
using testing::exprs;
using testing::zero_problem;

namespace {

constexpr double kPi = std::numbers::pi;

TimeGrid steps_grid(double T, int steps, int stride = 1) { return TimeGrid{T, steps, stride}; }

Grid g0_grid(const ProblemSpec &spec, int n, double T) {
  const int steps = static_cast<int>(std::lround(2 * n * T));
  return make_g0_grid(spec.graph, steps_grid(T, steps, steps / 10), 0.9);
}

double max_over(const EdgeODESolution &u, double (*exact)(double, double)) {
  double err = 0.0;
  for (int n = 0; n <= u.time.steps; ++n)
    for (int j = 0; j <= u.cells; ++j)
      err = std::max(err, std::abs(u(j, n) - exact(u.x(j), u.time.time(n))));
  return err;
}

} // namespace

TEST_SUITE("limit_solver") {

TEST_CASE("homogeneous limit problem without flux is zero") {
  G0Problem prob{zero_problem({{1.0, 0}, {1.0, 0}, {1.0, 1}}, {1}), true, {}};
  const auto fld = solve_g0(prob, g0_grid(prob.spec, 30, 1.0));
  CHECK(fld.slots() == 2);
  for (std::size_t s = 0; s < fld.slots(); ++s)
    for (int k = 0; k < fld.levels(); ++k)
      for (int j = 0; j < fld.nodes(s); ++j)
        CHECK(fld(s, j, k) == 0.0);
}

TEST_CASE("limit problem reproduces an eigenmode") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}, {1.0, 0}}, {1});
  spec.phi = testing::all("cos(pi * x / 2)", 3);
  const auto fld = solve_g0({spec, false, {}}, g0_grid(spec, 100, 1.0));
  double err = 0.0;
  for (std::size_t s = 0; s < fld.slots(); ++s) {
    const auto &m = fld.grid().edges[s];
    for (int k = 0; k < fld.levels(); ++k) {
      const double t = fld.grid().time.stored_time(k);
      for (int j = 0; j < fld.nodes(s); ++j)
        err = std::max(err, std::abs(fld(s, j, k) - std::cos(kPi * m.x(j) / 2) * std::cos(kPi * t / 2)));
    }
  }
  CHECK(err < 1e-3);
}

TEST_CASE("Kirchhoff flux drives a symmetric wave") {
  // Two unit edges, sum of slopes t: each edge carries -(t - x)_+^2 / 4 until the reflection returns.
  const auto spec = zero_problem({{1.0, 0}, {1.0, 0}, {1.0, 1}}, {1});
  double prev = 0.0;
  for (int n : {50, 100, 200}) {
    const auto grid = g0_grid(spec, n, 1.0);
    std::vector<double> nu;
    for (int i = 0; i <= grid.time.steps; ++i)
      nu.push_back(grid.time.time(i));
    const auto fld = solve_g0({spec, true, nu}, grid);
    double err = 0.0;
    for (int k = 0; k < fld.levels(); ++k) {
      const double t = fld.grid().time.stored_time(k);
      for (int j = 0; j < fld.nodes(0); ++j) {
        CHECK(fld(0, j, k) == fld(1, j, k));
        const double front = std::max(0.0, t - fld.grid().edges[0].x(j));
        err = std::max(err, std::abs(fld(0, j, k) + front * front / 4));
      }
    }
    CHECK(err < 2e-3);
    if (prev > 0.0)
      CHECK(prev / err > 1.8);
    prev = err;
  }
}

TEST_CASE("limit problem matches the direct solver with unit stiffness") {
  auto spec = zero_problem({{1.0, 0}, {0.8, 0}, {1.2, 0}, {1.0, 1}}, {1}, 1.0);
  spec.q = testing::all("1 + x", 4);
  spec.f = testing::all("sin(t) * (1 + x)", 4);
  spec.phi = exprs({"cos(pi * x / 2)", "cos(pi * x / 1.6)", "cos(pi * x / 2.4)", "1"});
  spec.mu = exprs({"0", "0", "0", "1"});
  auto all_g0 = spec;
  all_g0.graph = MetricStarGraph({{1.0, 0}, {0.8, 0}, {1.2, 0}}, {});
  for (auto *g : {&all_g0.q, &all_g0.f, &all_g0.phi, &all_g0.psi, &all_g0.mu})
    *g = GraphFunction({g->expr(0), g->expr(1), g->expr(2)});
  const auto grid = g0_grid(spec, 60, 1.0);
  const auto limit = solve_g0({spec, false, {}}, grid);
  const auto direct = direct_solve(all_g0, 1.0, make_g0_grid(all_g0.graph, grid.time, 0.9));
  for (std::size_t s = 0; s < 3; ++s)
    for (int k = 0; k < limit.levels(); ++k)
      for (int j = 0; j < limit.nodes(s); ++j)
        CHECK(limit(s, j, k) == direct(s, j, k));
  CHECK(vertex_trace(limit) == direct.trace());
}

TEST_CASE("limit compatibility includes the prescribed flux") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.phi = exprs({"x * (1 - x)", "0"});
  CHECK_FALSE(check_compatibility_g0({spec, false, {}}).pass());
  CHECK(check_compatibility_g0({spec, false, {1.0, 1.0}}).pass());
  CHECK_FALSE(check_compatibility_g0({spec, true, {0.5}}).pass());
  CHECK_THROWS_AS(solve_g0({spec, false, {}}, g0_grid(spec, 20, 1.0)), CompatibilityError);
}

TEST_CASE("degenerate edge: closed-form examples") {
  const auto tg = steps_grid(1.0, 200);
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.phi = exprs({"0", "x"});
  CHECK(max_over(solve_degenerate_edge(spec, 1, 40, tg), [](double x, double) { return x; }) < 1e-14);

  spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.phi = testing::all("1", 2);
  spec.q = testing::all("1", 2);
  CHECK(max_over(solve_degenerate_edge(spec, 1, 40, tg), [](double, double t) { return std::cos(t); }) <
        1e-14);

  spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.f = testing::all("1", 2);
  CHECK(max_over(solve_degenerate_edge(spec, 1, 40, tg), [](double, double t) { return t * t / 2; }) <
        1e-13);

  spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  CHECK(solve_degenerate_edge(spec, 1, 40, tg).zero);
  CHECK_THROWS_AS(solve_degenerate_edge(spec, 0, 40, tg), NumericalError);
}

TEST_CASE("degenerate edge: ODE residual") {
  auto spec = testing::reference_problem();
  const auto tg = steps_grid(1.5, 300);
  const auto u = solve_degenerate_edge(spec, 2, 50, tg);
  const double dt = tg.dt();
  double worst = 0.0;
  for (int n = 4; n + 2 <= tg.steps; ++n)
    for (int j = 0; j <= u.cells; ++j) {
      const double x = u.x(j);
      const double utt =
          (-u(j, n - 2) + 16 * u(j, n - 1) - 30 * u(j, n) + 16 * u(j, n + 1) - u(j, n + 2)) / (12 * dt * dt);
      const double t = tg.time(n);
      worst = std::max(worst, std::abs(utt + (1 + x) * u(j, n) - std::sin(t) * (1 + x)));
    }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Cauchy recursion") {
  const auto tg = steps_grid(1.0, 100);
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.f = exprs({"0", "2 * x^2"});
  const auto u0 = solve_degenerate_edge(spec, 1, 20, tg); // x^2 t^2
  const auto u2 = solve_cauchy_recursive(spec, 1, u0, 2);
  CHECK(max_over(u2, [](double, double t) { return std::pow(t, 4) / 6; }) < 1e-8);

  const auto u1 = zero_edge_solution(1, 1, 1.0, 20, tg);
  const auto u3 = solve_cauchy_recursive(spec, 1, u1, 3);
  CHECK(u3.zero);
  CHECK(u3(5, 50) == 0.0);
  CHECK_THROWS_AS(solve_cauchy_recursive(spec, 1, u0, 3), NumericalError);

  spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.phi = testing::all("1", 2);
  spec.q = testing::all("1", 2);
  const auto flat = solve_cauchy_recursive(spec, 1, solve_degenerate_edge(spec, 1, 20, tg), 2);
  CHECK(max_over(flat, [](double, double) { return 0.0; }) < 1e-12);
}

TEST_CASE("edge solution accessors") {
  const auto tg = steps_grid(1.0, 10);
  auto spec = zero_problem({{1.0, 0}, {2.0, 1}}, {1});
  spec.phi = exprs({"0", "3 * x - x^2"});
  const auto u = solve_degenerate_edge(spec, 1, 16, tg);
  CHECK(u.at(0.3, 4) == doctest::Approx(0.9 - 0.09).epsilon(1e-13));
  CHECK(u.dx_at_vertex(7) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(u.at_far_end(3) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("convolution quadrature") {
  const int m = 12;
  const double dt = 0.1;
  std::vector<double> g, k;
  for (int i = 0; i <= m; ++i) {
    g.push_back(std::pow(i * dt, 2));
    k.push_back(i * dt);
  }
  const auto c = convolve(g, k, dt);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == doctest::Approx(0.5 * dt * (dt * dt * 0.0 + 0.0)).epsilon(1e-14));
  for (int n = 2; n <= m; ++n)
    CHECK(c[static_cast<std::size_t>(n)] == doctest::Approx(std::pow(n * dt, 4) / 12).epsilon(1e-13));
}

TEST_CASE("fourth-order second derivative") {
  const int nodes = 11;
  const double h = 0.1;
  std::vector<double> u(nodes), d2(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double x = j * h;
    u[static_cast<std::size_t>(j)] = x * x * x * x - 2 * x * x * x + x;
  }
  second_derivative(u.data(), nodes, h, d2.data());
  for (int j = 0; j < nodes; ++j) {
    const double x = j * h;
    CHECK(d2[static_cast<std::size_t>(j)] == doctest::Approx(12 * x * x - 12 * x).epsilon(1e-9).scale(1.0));
  }
}

} // TEST_SUITE
