#include <doctest.h>

#include <cmath>

#include "spgraph/error.hpp"
#include "spgraph/layers.hpp"

using namespace spgraph;

namespace {

LayerGrid layer_grid(double T, int steps) { return make_layer_grid(TimeGrid{T, steps, 1}); }

std::vector<double> sampled(const LayerGrid &g, double (*fn)(double)) {
  std::vector<double> out;
  for (int n = 0; n <= g.time.steps; ++n)
    out.push_back(fn(g.time.time(n)));
  return out;
}

double ramp(double t) { return t * t; }
double bump(double x) { return std::exp(-4 * (x - 3) * (x - 3)); }

LayerField travelling(const LayerGrid &g) { return qp_solve({0.0, sampled(g, ramp), {}}, g); }

} // namespace

TEST_SUITE("layers") {

TEST_CASE("trivial problem gives a zero layer") {
  const auto g = layer_grid(1.0, 40);
  const auto v = qp_solve({0.7, {}, {}}, g);
  CHECK(v.zero());
  CHECK(v(3, 10) == 0.0);
  CHECK(v.interpolate(0.4, 20) == 0.0);
  CHECK(g.length() >= 3.0);
}

TEST_CASE("unit speed travelling wave") {
  const auto g = layer_grid(2.0, 100);
  const auto v = travelling(g);
  double err = 0.0;
  for (int n = 0; n <= g.time.steps; ++n)
    for (int j = 0; j <= g.cells; ++j) {
      const double d = std::max(0.0, g.time.time(n) - g.xi(j));
      err = std::max(err, std::abs(v(j, n) - d * d));
    }
  CHECK(err < 1e-6);
}

TEST_CASE("boundary flux of the travelling wave") {
  const auto g = layer_grid(1.0, 200);
  const auto flux = boundary_flux(travelling(g));
  REQUIRE(flux.size() == 201);
  for (int n = 3; n <= 200; ++n)
    CHECK(flux[static_cast<std::size_t>(n)] == doctest::Approx(-2 * g.time.time(n)).epsilon(1e-6));
}

TEST_CASE("support stays behind the front") {
  const auto g = layer_grid(1.5, 60);
  const auto w = qp_solve({1.3, sampled(g, [](double t) { return std::sin(t) * t; }), {}}, g);
  const auto v = qp_solve({-0.4, {}, {{2.0, 1, &w}, {-0.5, 2, &w}}}, g);
  for (const auto *fld : {&w, &v})
    for (int n = 0; n <= g.time.steps; ++n)
      for (int j = n + 1; j <= g.cells; ++j)
        CHECK((*fld)(j, n) == 0.0);
  CHECK_FALSE(v.zero());
}

TEST_CASE("reaction term converges under refinement") {
  auto solve = [](int steps) {
    const auto g = layer_grid(1.0, steps);
    return qp_solve({1.0, sampled(g, [](double t) { return t * t * std::cos(t); }), {}}, g);
  };
  const auto coarse = solve(100);
  const auto fine = solve(200);
  double diff = 0.0;
  for (int n = 0; n <= 100; ++n)
    for (int j = 0; j <= coarse.grid().cells; ++j)
      diff = std::max(diff, std::abs(coarse(j, n) - fine(2 * j, 2 * n)));
  CHECK(diff <= 1e-4);
}

TEST_CASE("integral representation: closed forms") {
  const auto zero = [](double) { return 0.0; };
  const auto one = [](double) { return 1.0; };
  const auto square = [](double x) { return x * x; };
  const auto sine = [](double x) { return std::sin(x); };
  CHECK(qp_oracle_below_characteristic(0.0, square, zero, 3.0, 1.0) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(qp_oracle_below_characteristic(0.0, zero, one, 3.0, 1.5) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(qp_oracle_below_characteristic(0.0, sine, zero, 2.0, 0.5) ==
        doctest::Approx(std::sin(2.0) * std::cos(0.5)).epsilon(1e-9));
  CHECK(qp_oracle_below_characteristic(2.0, one, zero, 5.0, 1.0) ==
        doctest::Approx(std::cos(std::sqrt(2.0))).epsilon(1e-9));
  CHECK(qp_oracle_below_characteristic(0.5, sine, zero, 4.0, 1.2) ==
        doctest::Approx(std::sin(4.0) * std::cos(std::sqrt(1.5) * 1.2)).epsilon(1e-8));
  CHECK_THROWS_AS(qp_oracle_below_characteristic(0.0, sine, zero, 1.0, 1.0), std::domain_error);
}

TEST_CASE("scheme agrees with the integral representation") {
  const auto g = make_layer_grid(TimeGrid{1.5, 600, 1}, 5.0);
  const auto beta = [](double x) { return x * bump(x); };
  for (double theta : {1.0, -0.8}) {
    const auto v = qp_solve_initial(theta, bump, beta, g);
    for (int n : {150, 450, 600})
      for (double s : {1.9, 2.7, 3.4}) {
        const double t = g.time.time(n);
        CHECK(std::abs(v.interpolate(s, n) - qp_oracle_below_characteristic(theta, bump, beta, s, t)) <
              1e-5);
      }
  }
}

TEST_CASE("physical coordinates") {
  const auto g = layer_grid(1.0, 100);
  const auto v = travelling(g);
  const int n = 80;
  CHECK(evaluate_physical(v, LayerSide::Vertex, 0.5, 1, 1.0, 0.15, n) ==
        doctest::Approx(0.25).epsilon(1e-9));
  CHECK(evaluate_physical(v, LayerSide::FarEnd, 0.5, 1, 1.0, 0.85, n) ==
        doctest::Approx(0.25).epsilon(1e-9));
  CHECK(evaluate_physical(v, LayerSide::Vertex, std::sqrt(0.5), 2, 2.0, 0.25, n) ==
        doctest::Approx(0.09).epsilon(1e-9));
  CHECK(evaluate_physical(v, LayerSide::Vertex, 0.01, 1, 1.0, 1.0, n) == 0.0);
  CHECK(evaluate_physical_at(v, LayerSide::Vertex, 0.5, 1, 1.0, 0.1, 0.75) ==
        doctest::Approx(0.3025).epsilon(1e-6));
}

TEST_CASE("invalid layer problems") {
  const auto short_grid = make_layer_grid(TimeGrid{1.0, 50, 1}, 1.0);
  CHECK_THROWS_AS(qp_solve({0.0, sampled(short_grid, ramp), {}}, short_grid), NumericalError);
  const auto g = layer_grid(1.0, 50);
  CHECK_THROWS_AS(qp_solve({0.0, sampled(g, [](double t) { return 1 + t; }), {}}, g), NumericalError);
  const auto other = layer_grid(1.0, 60);
  const auto w = travelling(other);
  CHECK_THROWS_AS(qp_solve({0.0, {}, {{1.0, 1, &w}}}, g), NumericalError);
}

} // TEST_SUITE
