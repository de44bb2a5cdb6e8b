#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spgraph/error.hpp"
#include "spgraph/kernels.hpp"
#include "phi_oracle.hpp"

using namespace spgraph::kernels;
using testing::phi_oracle;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("cs and sn: values from the closed forms") {
  for (double t : {0.0, 0.3, 1.0, 7.5})
    CHECK(sn(0.0, t) == doctest::Approx(t).epsilon(1e-15));
  CHECK(cs(1.0, std::numbers::pi) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(sn(-1.0, 1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
  CHECK(sn(-1.0, 1.0) == doctest::Approx(1.175201).epsilon(1e-6));
  CHECK(cs(-4.0, 0.7) == doctest::Approx(std::cosh(1.4)).epsilon(1e-14));
  CHECK(sn(4.0, 0.7) == doctest::Approx(std::sin(1.4) / 2.0).epsilon(1e-14));
}

TEST_CASE("cs and sn: exact values at t = 0") {
  for (double th : {-10.0, -1e-8, 0.0, 1e-8, 3.0}) {
    CHECK(cs(th, 0.0) == 1.0);
    CHECK(sn(th, 0.0) == 0.0);
  }
}

TEST_CASE("cs and sn: Pythagorean identity for random positive theta") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> th(1e-3, 50.0), tt(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double a = th(rng), t = tt(rng);
    CHECK(std::abs(cs(a, t) * cs(a, t) + a * sn(a, t) * sn(a, t) - 1.0) <= 1e-10);
  }
}

TEST_CASE("cs and sn: smooth crossing of theta = 0") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> th(-1e-4, 1e-4), tt(0.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double a = th(rng), t = tt(rng);
    CHECK(std::abs(cs(a, t) - cs(-a, t)) <= 2.0 * std::abs(a) * t * t * (1.0 + t * t) + 1e-15);
  }
  // Series and closed forms agree at the switchover |theta t^2| = 1.
  for (double th0 : {1.0, -1.0}) {
    const double below = cs(th0 * (1 - 1e-12), 1.0), above = cs(th0 * (1 + 1e-12), 1.0);
    CHECK(std::abs(below - above) < 1e-11);
    CHECK(std::abs(sn(th0 * (1 - 1e-12), 1.0) - sn(th0 * (1 + 1e-12), 1.0)) < 1e-11);
  }
}

TEST_CASE("phi_entire: reference values") {
  CHECK(phi_entire(0.0) == 1.0);
  CHECK(phi_entire(4.0) == doctest::Approx(0.2238907791).epsilon(1e-10));
  CHECK(phi_entire(-4.0) == doctest::Approx(2.2795853023).epsilon(1e-10));
  CHECK(rel(phi_entire(4.0), phi_oracle(4.0)) < 1e-14);
}

TEST_CASE("phi_entire: extended-precision oracle on [-100, 400]") {
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = -100.0 + 500.0 * i / 1000.0;
    worst = std::max(worst, rel(phi_entire(z), phi_oracle(z)));
  }
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> zz(-100.0, 400.0);
  for (int i = 0; i < 300; ++i) {
    const double z = zz(rng);
    worst = std::max(worst, rel(phi_entire(z), phi_oracle(z)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("phi_entire: derivatives against the oracle") {
  for (double z : {-80.0, -3.0, 0.0, 0.5, 17.0, 150.0, 399.0})
    for (int k = 1; k <= 2; ++k)
      CHECK(rel(phi_entire_derivative(z, k), phi_oracle(z, k)) <= 1e-12);
}

TEST_CASE("phi_entire: asymptotic branch continues the series") {
  for (double z : {-400.0, 400.0})
    for (int k = 0; k <= 2; ++k) {
      const double inside = phi_entire_derivative(z * (1 - 1e-13), k);
      const double outside = phi_entire_derivative(z * (1 + 1e-13), k);
      CHECK(rel(outside, inside) < 1e-9);
    }
  CHECK(rel(phi_entire(1600.0), phi_oracle(1600.0)) < 1e-9);
  CHECK(rel(phi_entire(-1600.0), phi_oracle(-1600.0)) < 1e-12);
  CHECK(rel(phi_entire(2000.0), phi_oracle(2000.0)) < 1e-9);
}

TEST_CASE("phi_entire: range errors") {
  CHECK_THROWS_AS(phi_entire(2e6), spgraph::NumericalError);
  CHECK_THROWS_AS(phi_entire(-9e5), spgraph::NumericalError);
  CHECK_THROWS_AS(phi_entire(std::nan("")), spgraph::NumericalError);
  CHECK_THROWS_AS(phi_entire_derivative(1.0, 3), spgraph::NumericalError);
}

TEST_CASE("phi_entire satisfies z Phi'' + Phi' + Phi / 4 = 0") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> zz(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double z = zz(rng);
    const double r = z * phi_entire_derivative(z, 2) + phi_entire_derivative(z, 1) + phi_entire(z) / 4.0;
    CHECK(std::abs(r) <= 1e-9);
  }
}

TEST_CASE("dt_kernel") {
  for (double t : {0.0, 0.5, 2.0})
    CHECK(dt_kernel(0.0, t, 1.0, 0.2) == 0.0);
  for (double th : {-2.0, 1.0, 5.0})
    CHECK(dt_kernel(th, 0.0, 3.0, 1.0) == 0.0);
  CHECK(dt_kernel(1.0, 1.0, 2.0, 0.0) == doctest::Approx(-2.0 * phi_oracle(3.0, 1)).epsilon(1e-13));
  // Matches a centred difference of the kernel itself.
  const double th = 1.7, s = 2.0, y = 1.4, t = 0.9, h = 1e-5;
  auto k = [&](double tt) { return phi_entire(th * ((s - y) * (s - y) - tt * tt)); };
  CHECK(dt_kernel(th, t, s, y) == doctest::Approx((k(t + h) - k(t - h)) / (2 * h)).epsilon(1e-8));
}

} // TEST_SUITE
