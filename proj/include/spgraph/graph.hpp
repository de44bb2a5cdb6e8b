#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "spgraph/expr.hpp"

namespace spgraph {

/// One edge of the star, parametrized by arclength tau in [0, length] with tau = 0 at the
/// central vertex. The boundary vertex a_j shares the edge's index.
struct Edge {
  double length = 1.0;
  int subgraph = 0;
};

/// Star graph split into subgraphs G_0 .. G_k. The stiffness on G_i is eps^(2 m_i) with
/// m_0 = 0 < m_1 < ... < m_k.
class MetricStarGraph {
public:
  MetricStarGraph() = default;
  /// exponents lists m_1 .. m_k; m_0 = 0 is implicit. Throws ConfigError on invalid input.
  MetricStarGraph(std::vector<Edge> edges, std::vector<int> exponents);

  std::size_t edge_count() const { return edges_.size(); }
  const Edge &edge(std::size_t e) const;
  const std::vector<Edge> &edges() const { return edges_; }

  /// Number of degenerate subgraphs k.
  int k() const { return static_cast<int>(exponents_.size()) - 1; }
  /// m_i for i in 0..k.
  int exponent(int i) const;
  int exponent_of_edge(std::size_t e) const { return exponent(edge(e).subgraph); }
  const std::vector<int> &exponents() const { return exponents_; }

  bool degenerate(std::size_t e) const { return edge(e).subgraph != 0; }
  std::vector<std::size_t> edges_in(int subgraph) const;
  std::vector<std::size_t> degenerate_edges() const;

private:
  std::vector<Edge> edges_;
  std::vector<int> exponents_{0};
};

/// Per-edge scalar function of (x, t). Expression-backed restrictions differentiate
/// symbolically; sampled (callable) restrictions use fourth-order finite differences.
class GraphFunction {
public:
  using Sampled = std::function<double(double x, double t)>;
  using Restriction = std::variant<Expr, Sampled>;

  GraphFunction() = default;
  explicit GraphFunction(std::vector<Restriction> per_edge) : per_edge_(std::move(per_edge)) {}
  static GraphFunction from_exprs(std::vector<Expr> exprs);
  static GraphFunction uniform(const Expr &e, std::size_t edges);
  static GraphFunction zero(std::size_t edges) { return uniform(Expr(), edges); }

  std::size_t size() const { return per_edge_.size(); }
  bool symbolic() const;
  bool is_symbolic(std::size_t e) const;
  const Expr &expr(std::size_t e) const; // throws if sampled

  double value(std::size_t e, double x, double t) const;

  /// Derivative of order `order` in `var` at (x, t). For sampled restrictions order <= 2,
  /// with one-sided stencils where the point is within two steps of [x_lo, x_hi] (x) or of
  /// t = 0 (t). Spatial step is (x_hi - x_lo) / 1000.
  double derivative(std::size_t e, Var var, int order, double x, double t, double x_lo,
                    double x_hi) const;

private:
  std::vector<Restriction> per_edge_;
};

struct ProblemSpec {
  MetricStarGraph graph;
  GraphFunction q;
  GraphFunction f;
  GraphFunction phi;
  GraphFunction psi;
  GraphFunction mu; // boundary data at a_j, a function of t (evaluated at x = length)
  double T = 1.0;

  /// Sizes, horizon, and continuity of phi, psi at the central vertex. Throws ConfigError.
  void validate() const;

  double length(std::size_t e) const { return graph.edge(e).length; }
  double mu_at(std::size_t e, double t) const { return mu.value(e, length(e), t); }
};

/// eps^(2 m_i(e)). Throws std::out_of_range for an unknown edge, std::domain_error for eps
/// outside (0, 1).
double b_eps(const ProblemSpec &spec, double eps, std::size_t e);
double b_eps(const MetricStarGraph &graph, double eps, std::size_t e);

struct CompatibilityCondition {
  std::string name;
  std::string location;
  double residual = 0.0;
  bool pass = true;
};

struct CompatibilityReport {
  std::vector<CompatibilityCondition> conditions;
  double tol = 0.0;

  bool pass() const;
  std::vector<CompatibilityCondition> failures() const;
  std::string to_text() const;
};

/// Default tolerance: 1e-8 for symbolic data, 1e-4 when any datum is sampled.
double default_compatibility_tol(const ProblemSpec &spec);

/// phi(a_j) = mu(a_j, 0), psi(a_j) = d_t mu(a_j, 0), sum_{e in G_i} phi'_e(a) = 0.
/// A negative tol selects default_compatibility_tol.
CompatibilityReport check_compatibility_C1(const ProblemSpec &spec, double tol = -1.0);

/// The second-order set. Informational only.
CompatibilityReport check_compatibility_C2(const ProblemSpec &spec, double tol = -1.0);

} // namespace spgraph
