#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spgraph/error.hpp"
#include "spgraph/graph.hpp"

using namespace spgraph;
using testing::all;
using testing::exprs;
using testing::zero_problem;

TEST_SUITE("graph_core") {

TEST_CASE("stiffness per subgraph") {
  const MetricStarGraph g({{1.0, 0}, {1.0, 1}, {2.0, 2}}, {1, 2});
  CHECK(b_eps(g, 0.1, 0) == 1.0);
  CHECK(b_eps(g, 0.1, 1) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(b_eps(g, 0.5, 2) == 0.0625);
  CHECK_THROWS_AS(b_eps(g, 0.1, 3), std::out_of_range);
  CHECK_THROWS_AS(b_eps(g, 0.0, 0), std::domain_error);
  CHECK_THROWS_AS(b_eps(g, 1.0, 0), std::domain_error);
}

TEST_CASE("stiffness decreases with the exponent and is 1 only on G_0") {
  const MetricStarGraph g({{1.0, 0}, {1.0, 1}, {1.0, 2}, {1.0, 3}}, {1, 3, 4});
  for (double eps : {0.9, 0.5, 0.01}) {
    for (std::size_t e = 1; e < 4; ++e) {
      CHECK(b_eps(g, eps, e) < b_eps(g, eps, e - 1));
      CHECK(b_eps(g, eps, e) != 1.0);
    }
    CHECK(b_eps(g, eps, 0) == 1.0);
  }
}

TEST_CASE("graph structure") {
  const MetricStarGraph g({{1.0, 1}, {0.5, 0}, {2.0, 1}, {1.0, 2}}, {2, 3});
  CHECK(g.k() == 2);
  CHECK(g.exponent(0) == 0);
  CHECK(g.exponent(2) == 3);
  CHECK(g.exponent_of_edge(0) == 2);
  CHECK(g.edges_in(1) == std::vector<std::size_t>{0, 2});
  CHECK(g.degenerate_edges() == std::vector<std::size_t>{0, 2, 3});
  CHECK_FALSE(g.degenerate(1));
}

TEST_CASE("invalid graphs name the offending field") {
  auto path_of = [](auto &&make) {
    try {
      make();
    } catch (const ConfigError &e) {
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of([] { MetricStarGraph({}, {}); }) == "graph.edges");
  CHECK(path_of([] { MetricStarGraph({{-1.0, 0}}, {}); }) == "graph.edges[0].length");
  CHECK(path_of([] { MetricStarGraph({{1.0, 0}, {1.0, 2}}, {1}); }) == "graph.edges[1].subgraph");
  CHECK(path_of([] { MetricStarGraph({{1.0, 0}, {1.0, 1}}, {2, 1}); }) == "graph.exponents[1]");
  CHECK(path_of([] { MetricStarGraph({{1.0, 0}, {1.0, 1}}, {0}); }) == "graph.exponents[0]");
  CHECK(path_of([] { MetricStarGraph({{1.0, 0}, {1.0, 1}}, {1, 2}); }) == "graph.edges");
}

TEST_CASE("problem validation") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  CHECK_NOTHROW(spec.validate());
  spec.phi = exprs({"1 + x", "2 - x"});
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.phi = exprs({"1 + x", "1 - x"});
  CHECK_NOTHROW(spec.validate());
  spec.q = GraphFunction::zero(3);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.q = GraphFunction::zero(2);
  spec.T = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("first-order compatibility") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 0}, {1.0, 1}}, {1});
  CHECK(check_compatibility_C1(spec).pass());

  spec.phi = exprs({"x", "-x", "0"});
  spec.mu = exprs({"1", "-1", "0"});
  CHECK(check_compatibility_C1(spec).pass());

  spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  spec.phi = exprs({"cos(pi*x/2)", "1"});
  const auto rep = check_compatibility_C1(spec);
  REQUIRE_FALSE(rep.pass());
  const auto bad = rep.failures();
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].name == "phi(a_j) = mu(a_j,0)");
  CHECK(bad[0].location == "a_2 (edge 1)");
  CHECK(bad[0].residual == doctest::Approx(1.0));
}

TEST_CASE("first-order compatibility: velocity and slope conditions") {
  auto spec = zero_problem({{1.0, 0}, {2.0, 1}}, {1});
  spec.mu = exprs({"0", "t"});
  auto rep = check_compatibility_C1(spec);
  REQUIRE(rep.failures().size() == 1);
  CHECK(rep.failures()[0].name == "psi(a_j) = d_t mu(a_j,0)");
  spec.psi = exprs({"0", "x / 2"});
  spec.validate();
  CHECK(check_compatibility_C1(spec).pass());

  spec = zero_problem({{1.0, 0}, {1.0, 0}, {1.0, 1}}, {1});
  spec.phi = exprs({"x", "x", "0"});
  spec.mu = exprs({"1", "1", "0"});
  rep = check_compatibility_C1(spec);
  REQUIRE(rep.failures().size() == 1);
  CHECK(rep.failures()[0].location == "G_0");
  CHECK(rep.failures()[0].residual == doctest::Approx(2.0));
}

TEST_CASE("first-order compatibility is invariant under relabelling within a subgraph") {
  auto a = zero_problem({{1.0, 0}, {2.0, 0}, {1.0, 1}}, {1});
  a.phi = exprs({"x", "-x + x^2/4", "0"});
  a.mu = exprs({"1", "-1", "0"});
  auto b = zero_problem({{2.0, 0}, {1.0, 0}, {1.0, 1}}, {1});
  b.phi = exprs({"-x + x^2/4", "x", "0"});
  b.mu = exprs({"-1", "1", "0"});
  const auto ra = check_compatibility_C1(a);
  const auto rb = check_compatibility_C1(b);
  CHECK(ra.pass() == rb.pass());
  CHECK(ra.pass());
  CHECK(ra.conditions.back().residual == rb.conditions.back().residual);
}

TEST_CASE("sampled data use finite differences with a looser tolerance") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 0}, {1.0, 1}}, {1});
  const GraphFunction::Sampled up = [](double x, double) { return std::sin(x); };
  const GraphFunction::Sampled down = [](double x, double) { return -std::sin(x); };
  spec.phi = GraphFunction({up, down, Expr()});
  spec.mu = exprs({"sin(1)", "-sin(1)", "0"});
  CHECK(default_compatibility_tol(spec) == 1e-4);
  const auto rep = check_compatibility_C1(spec);
  CHECK(rep.pass());
  for (const auto &c : rep.conditions)
    CHECK(c.residual <= 10 * 1e-8);
  CHECK(spec.phi.derivative(0, Var::X, 1, 0.0, 0.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spec.phi.derivative(0, Var::X, 2, 1.0, 0.0, 0.0, 1.0) ==
        doctest::Approx(-std::sin(1.0)).epsilon(1e-6));
  CHECK(spec.phi.derivative(0, Var::X, 1, 0.5, 0.0, 0.0, 1.0) ==
        doctest::Approx(std::cos(0.5)).epsilon(1e-10));
}

TEST_CASE("second-order compatibility") {
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}}, {1});
  CHECK(check_compatibility_C2(spec).pass());

  spec.phi = exprs({"x^2 - 2*x", "0"});
  spec.mu = exprs({"-1", "0"});
  spec.validate();
  CHECK(check_compatibility_C1(spec).failures().size() == 1); // slope -2 at the vertex
  const auto rep = check_compatibility_C2(spec);
  bool found = false;
  for (const auto &c : rep.failures())
    if (c.name == "phi''_e(a) = 0" && c.location == "edge 0") {
      found = true;
      CHECK(c.residual == doctest::Approx(2.0));
    }
  CHECK(found);
}

TEST_CASE("second-order report on the reference data") {
  const auto spec = testing::reference_problem();
  const auto rep = check_compatibility_C2(spec);
  for (const auto &c : rep.conditions) {
    if (c.name == "phi''_e(a) = 0")
      CHECK(c.residual == doctest::Approx(M_PI * M_PI / 4));
    else
      CHECK(c.pass);
  }
}

} // TEST_SUITE
