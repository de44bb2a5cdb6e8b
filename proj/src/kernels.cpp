#include "spgraph/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spgraph/error.hpp"

namespace spgraph::kernels {

namespace {

template <typename Real> struct KahanSum {
  Real sum = 0;
  Real carry = 0;
  void add(Real v) {
    const Real y = v - carry;
    const Real t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Series near theta t^2 = 0, where the closed forms lose accuracy or divide by ~0.
constexpr double kSmallArgument = 1.0;

double cs_series(double w) {
  KahanSum<double> acc;
  double term = 1.0;
  for (int n = 0; n < 40; ++n) {
    acc.add(term);
    term *= -w / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    if (std::abs(term) < 1e-18 * std::abs(acc.sum))
      break;
  }
  return acc.sum;
}

double sn_series(double w) {
  KahanSum<double> acc;
  double term = 1.0;
  for (int n = 0; n < 40; ++n) {
    acc.add(term);
    term *= -w / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    if (std::abs(term) < 1e-18 * std::abs(acc.sum))
      break;
  }
  return acc.sum;
}

// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2, built from error-free transforms.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

DoubleDouble add(DoubleDouble a, DoubleDouble b) {
  const double s = a.hi + b.hi;
  const double bb = s - a.hi;
  const double err = (a.hi - (s - bb)) + (b.hi - bb);
  return quick_two_sum(s, err + a.lo + b.lo);
}

DoubleDouble mul(DoubleDouble a, double b) {
  const double p = a.hi * b;
  const double err = std::fma(a.hi, b, -p);
  return quick_two_sum(p, err + a.lo * b);
}

DoubleDouble div(DoubleDouble a, double b) {
  const double q1 = a.hi / b;
  const DoubleDouble back = mul({q1, 0.0}, b);
  const double r = ((a.hi - back.hi) - back.lo + a.lo);
  return quick_two_sum(q1, r / b);
}

// Phi^{(k)}(z) = (-1/4)^k sum_m (-z/4)^m / (m! (m+k)!), summed in double-double: for z near
// 400 the largest term is ~1e7 times the result.
double phi_series(double z, int k) {
  const double q = -z / 4.0;
  DoubleDouble term{1.0, 0.0};
  for (int j = 2; j <= k; ++j)
    term = div(term, j);
  DoubleDouble acc;
  for (int m = 0; m < 400; ++m) {
    acc = add(acc, term);
    term = div(mul(term, q), (m + 1.0) * (m + 1.0 + k));
    if (m > 2 && std::abs(term.hi) < 1e-33 * std::max(std::abs(acc.hi), 1e-300))
      break;
  }
  double scale = 1.0;
  for (int j = 0; j < k; ++j)
    scale *= -0.25;
  return (acc.hi + acc.lo) * scale;
}

// Hankel asymptotic terms a_k(nu) / x^k, summed until they stop decreasing.
struct Asymptotic {
  double p = 0.0; // sum (-1)^j a_{2j} / x^{2j}
  double q = 0.0; // sum (-1)^j a_{2j+1} / x^{2j+1}
  double i = 0.0; // sum (-1)^k a_k / x^k
};

Asymptotic hankel_sums(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  Asymptotic out;
  KahanSum<double> p, q, i;
  double term = 1.0;
  double prev = 2.0;
  for (int k = 0; k < 200; ++k) {
    if (std::abs(term) > std::abs(prev) || std::abs(term) < 1e-20)
      break;
    const int j = k / 2;
    const double sign_j = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      p.add(sign_j * term);
    else
      q.add(sign_j * term);
    i.add((k % 2 == 0 ? 1.0 : -1.0) * term);
    prev = term;
    const double odd = 2.0 * k + 1.0;
    term *= (mu - odd * odd) / ((k + 1.0) * 8.0 * x);
  }
  out.p = p.sum;
  out.q = q.sum;
  out.i = i.sum;
  return out;
}

double bessel_j_asymptotic(int nu, double x) {
  const auto s = hankel_sums(nu, x);
  const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (s.p * std::cos(chi) - s.q * std::sin(chi));
}

double bessel_i_asymptotic(int nu, double x) {
  const auto s = hankel_sums(nu, x);
  const double v = std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * s.i;
  if (!std::isfinite(v))
    throw NumericalError("phi_entire: I" + std::to_string(nu) + "(" + std::to_string(x) +
                         ") overflows double");
  return v;
}

void check_range(double z) {
  if (!std::isfinite(z) || std::abs(z) > kPhiRange)
    throw NumericalError("phi_entire: argument " + std::to_string(z) + " outside supported range");
}

} // namespace

double cs(double theta, double t) {
  const double w = theta * t * t;
  if (std::abs(w) <= kSmallArgument)
    return cs_series(w);
  if (theta > 0.0)
    return std::cos(std::sqrt(theta) * t);
  return std::cosh(std::sqrt(-theta) * t);
}

double sn(double theta, double t) {
  const double w = theta * t * t;
  if (std::abs(w) <= kSmallArgument)
    return t * sn_series(w);
  if (theta > 0.0) {
    const double r = std::sqrt(theta);
    return std::sin(r * t) / r;
  }
  const double r = std::sqrt(-theta);
  return std::sinh(r * t) / r;
}

double phi_entire(double z) { return phi_entire_derivative(z, 0); }

double phi_entire_derivative(double z, int k) {
  check_range(z);
  if (k < 0 || k > 2)
    throw NumericalError("phi_entire_derivative: order must be 0, 1 or 2");
  if (std::abs(z) <= kSeriesLimit)
    return phi_series(z, k);

  const double x = std::sqrt(std::abs(z));
  double phi0 = 0.0;
  double phi1 = 0.0;
  if (z > 0.0) {
    phi0 = bessel_j_asymptotic(0, x);
    if (k > 0)
      phi1 = -bessel_j_asymptotic(1, x) / (2.0 * x);
  } else {
    phi0 = bessel_i_asymptotic(0, x);
    if (k > 0)
      phi1 = -bessel_i_asymptotic(1, x) / (2.0 * x);
  }
  if (k == 0)
    return phi0;
  if (k == 1)
    return phi1;
  // z Phi'' + Phi' + Phi / 4 = 0
  return -(phi1 + 0.25 * phi0) / z;
}

double dt_kernel(double theta, double t, double s, double y) {
  if (theta == 0.0 || t == 0.0)
    return 0.0;
  const double d = s - y;
  return -2.0 * theta * t * phi_entire_derivative(theta * (d * d - t * t), 1);
}

} // namespace spgraph::kernels
