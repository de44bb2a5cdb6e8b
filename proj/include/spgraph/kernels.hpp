#pragma once

// Entire-function kernels used by the explicit solution formulas.
//
// cs/sn continue cos(sqrt(theta) t) and sin(sqrt(theta) t)/sqrt(theta) analytically
// through theta = 0 (cosh/sinh for theta < 0). phi_entire is
//
//     Phi(z) = sum_{n>=0} (-z/4)^n / (n!)^2,
//
// so Phi(z) = J0(sqrt(z)) for z >= 0 and Phi(z) = I0(sqrt(-z)) for z < 0.

namespace spgraph::kernels {

/// Series/asymptotic switchover for phi_entire.
inline constexpr double kSeriesLimit = 400.0;
/// Largest |z| accepted by phi_entire and its derivatives.
inline constexpr double kPhiRange = 1e6;

double cs(double theta, double t);
double sn(double theta, double t);

/// Phi(z); throws NumericalError for |z| > kPhiRange or when the value overflows.
double phi_entire(double z);

/// k-th derivative of Phi, k in {0, 1, 2}.
double phi_entire_derivative(double z, int k);

/// d/dt of k(t, s, y) = Phi(theta ((s - y)^2 - t^2)), i.e. -2 theta t Phi'(theta ((s - y)^2 - t^2)).
double dt_kernel(double theta, double t, double s, double y);

} // namespace spgraph::kernels
