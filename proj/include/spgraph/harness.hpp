#pragma once

#include <string>
#include <vector>

#include "spgraph/field.hpp"
#include "spgraph/graph.hpp"

namespace spgraph {

struct Norms {
  double linf = 0.0;
  double l2 = 0.0;  // over all edges x [0, T]
  double h1x = 0.0; // L2 of the difference and of its x-derivative
};

/// Trapezoid-weighted norms of a - b over stored levels. Throws NumericalError on layout mismatch.
Norms norms(const Field &a, const Field &b);

struct PowerFit {
  double order = 0.0;
  double constant = 0.0;
  double residual = 0.0; // RMS of log-space residuals
};

/// Least squares for log err = log C + order log eps. Needs >= 3 points and positive errors.
PowerFit fit_power_law(const std::vector<double> &eps, const std::vector<double> &err);

struct GridConfig {
  int n_per_edge = 200;
  double cfl = 0.9;
  int snapshots = 50; // stored time levels minus one
};

struct RunConfig {
  ProblemSpec spec;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  int p = 1;
  GridConfig grid;
  double margin = 0.3;
};

/// Reads and validates a JSON configuration. Throws ConfigError naming the offending field, or
/// std::runtime_error when the file cannot be read.
RunConfig load_config(const std::string &path);
RunConfig parse_config(const std::string &json_text);

/// Time grid shared by every solve of a sweep: dt from cfl * min_e length_e / n_per_edge.
TimeGrid sweep_time_grid(const ProblemSpec &spec, const GridConfig &grid);

struct SweepPoint {
  double eps = 0.0;
  Norms error;             // direct solution vs partial sum
  double refinement = 0.0; // L2 discretization error estimate of the direct solution
  double sup_h = 0.0;
  double sup_nu = 0.0;
  double floor_h = 0.0;
  double floor_nu = 0.0;
};

struct ConvergenceReport {
  int p = 0;
  int leading_exponent = 1;
  std::vector<SweepPoint> points;
  PowerFit fit;               // L2 error
  double theoretical = 0.0;   // (p + 1/2) m_1
  PowerFit nu_fit;            // sup_t |nu|
  double nu_theoretical = 0.0; // (p + 1) m_1
  double margin = 0.3;
  bool refinement_ok = false;
  bool pass = false;    // refinement_ok and L2 order >= theoretical - margin
  bool nu_pass = false; // nu order >= nu_theoretical - margin
  std::string note;     // reason for an inconclusive sweep
};

/// Direct solves on a fine and a half-resolution time grid, partial sums, norms and fits for
/// each eps (strictly decreasing, at least 3). Points run concurrently when `parallel`.
ConvergenceReport convergence_sweep(const ProblemSpec &spec, int p,
                                    const std::vector<double> &epsilons, const GridConfig &grid,
                                    double margin, bool parallel = true);

/// epsilon,err_linf,err_l2,err_h1x,fitted_order,theoretical_order,pass
void write_report_csv(const ConvergenceReport &rep, const std::string &path);
/// epsilon,sup_h,sup_nu
void write_residuals_csv(const ConvergenceReport &rep, const std::string &path);
/// log_eps,log_err_l2,fit_log_err_l2
void write_plot_csv(const ConvergenceReport &rep, const std::string &path);
/// Plain-text summary including the norm disclaimer.
std::string summarize(const ConvergenceReport &rep);

/// Command-line entry point: check | solve | expand | verify. Returns the process exit code.
int run_cli(int argc, char **argv);

} // namespace spgraph
