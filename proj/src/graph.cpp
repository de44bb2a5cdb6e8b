#include "spgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spgraph/error.hpp"

namespace spgraph {

MetricStarGraph::MetricStarGraph(std::vector<Edge> edges, std::vector<int> exponents)
    : edges_(std::move(edges)) {
  if (edges_.empty())
    throw ConfigError("graph.edges", "graph must have at least one edge");
  exponents_.assign(1, 0);
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const int m = exponents[i];
    if (m < 1)
      throw ConfigError("graph.exponents[" + std::to_string(i) + "]", "exponent must be >= 1");
    if (m <= exponents_.back())
      throw ConfigError("graph.exponents[" + std::to_string(i) + "]",
                        "exponents must be strictly increasing");
    exponents_.push_back(m);
  }
  const int kk = static_cast<int>(exponents_.size()) - 1;
  std::vector<int> count(exponents_.size(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto path = "graph.edges[" + std::to_string(e) + "]";
    if (!(edges_[e].length > 0.0) || !std::isfinite(edges_[e].length))
      throw ConfigError(path + ".length", "length must be positive");
    if (edges_[e].subgraph < 0 || edges_[e].subgraph > kk)
      throw ConfigError(path + ".subgraph", "subgraph index outside 0.." + std::to_string(kk));
    ++count[edges_[e].subgraph];
  }
  for (int i = 0; i <= kk; ++i)
    if (count[i] == 0)
      throw ConfigError("graph.edges", "subgraph " + std::to_string(i) + " has no edges");
}

const Edge &MetricStarGraph::edge(std::size_t e) const {
  if (e >= edges_.size())
    throw std::out_of_range("unknown edge id " + std::to_string(e));
  return edges_[e];
}

int MetricStarGraph::exponent(int i) const {
  if (i < 0 || i > k())
    throw std::out_of_range("unknown subgraph " + std::to_string(i));
  return exponents_[static_cast<std::size_t>(i)];
}

std::vector<std::size_t> MetricStarGraph::edges_in(int subgraph) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].subgraph == subgraph)
      out.push_back(e);
  return out;
}

std::vector<std::size_t> MetricStarGraph::degenerate_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].subgraph != 0)
      out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------

GraphFunction GraphFunction::from_exprs(std::vector<Expr> exprs) {
  std::vector<Restriction> r;
  r.reserve(exprs.size());
  for (auto &e : exprs)
    r.emplace_back(std::move(e));
  return GraphFunction(std::move(r));
}

GraphFunction GraphFunction::uniform(const Expr &e, std::size_t edges) {
  return from_exprs(std::vector<Expr>(edges, e));
}

bool GraphFunction::symbolic() const {
  return std::all_of(per_edge_.begin(), per_edge_.end(),
                     [](const Restriction &r) { return std::holds_alternative<Expr>(r); });
}

bool GraphFunction::is_symbolic(std::size_t e) const {
  return std::holds_alternative<Expr>(per_edge_.at(e));
}

const Expr &GraphFunction::expr(std::size_t e) const {
  const auto *p = std::get_if<Expr>(&per_edge_.at(e));
  if (!p)
    throw std::logic_error("edge " + std::to_string(e) + " holds sampled data, not an expression");
  return *p;
}

double GraphFunction::value(std::size_t e, double x, double t) const {
  const auto &r = per_edge_.at(e);
  if (const auto *ex = std::get_if<Expr>(&r))
    return eval(*ex, x, t);
  return std::get<Sampled>(r)(x, t);
}

namespace {

// Fourth-order stencils.
double fd_first(const std::function<double(double)> &g, double s, double h, int side) {
  if (side > 0)
    return (-25 * g(s) + 48 * g(s + h) - 36 * g(s + 2 * h) + 16 * g(s + 3 * h) - 3 * g(s + 4 * h)) /
           (12 * h);
  if (side < 0)
    return -fd_first([&](double u) { return g(2 * s - u); }, s, h, 1);
  return (g(s - 2 * h) - 8 * g(s - h) + 8 * g(s + h) - g(s + 2 * h)) / (12 * h);
}

double fd_second(const std::function<double(double)> &g, double s, double h, int side) {
  if (side != 0) {
    const double d = side > 0 ? h : -h;
    return (45 * g(s) - 154 * g(s + d) + 214 * g(s + 2 * d) - 156 * g(s + 3 * d) +
            61 * g(s + 4 * d) - 10 * g(s + 5 * d)) /
           (12 * h * h);
  }
  return (-g(s - 2 * h) + 16 * g(s - h) - 30 * g(s) + 16 * g(s + h) - g(s + 2 * h)) / (12 * h * h);
}

constexpr double kTimeStep = 1e-3;

} // namespace

double GraphFunction::derivative(std::size_t e, Var var, int order, double x, double t,
                                 double x_lo, double x_hi) const {
  const auto &r = per_edge_.at(e);
  if (const auto *ex = std::get_if<Expr>(&r))
    return eval(diff(*ex, var, order), x, t);
  if (order == 0)
    return value(e, x, t);
  if (order > 2)
    throw NumericalError("sampled data: derivatives above order 2 are not supported");

  const auto &fn = std::get<Sampled>(r);
  std::function<double(double)> g;
  double s = 0.0;
  double h = 0.0;
  int side = 0;
  if (var == Var::X) {
    g = [&](double u) { return fn(u, t); };
    s = x;
    h = (x_hi - x_lo) / 1000.0;
    if (x - 2 * h < x_lo)
      side = 1;
    else if (x + 2 * h > x_hi)
      side = -1;
  } else {
    g = [&](double u) { return fn(x, u); };
    s = t;
    h = kTimeStep;
    if (t - 2 * h < 0.0)
      side = 1;
  }
  return order == 1 ? fd_first(g, s, h, side) : fd_second(g, s, h, side);
}

// ---------------------------------------------------------------------------

void ProblemSpec::validate() const {
  const std::size_t n = graph.edge_count();
  const std::pair<const GraphFunction *, const char *> data[] = {
      {&q, "q"}, {&f, "f"}, {&phi, "phi"}, {&psi, "psi"}, {&mu, "mu"}};
  for (const auto &[fn, name] : data)
    if (fn->size() != n)
      throw ConfigError(name, "expected " + std::to_string(n) + " per-edge entries, got " +
                                  std::to_string(fn->size()));
  if (!(T > 0.0) || !std::isfinite(T))
    throw ConfigError("T", "time horizon must be positive");

  const double tol = default_compatibility_tol(*this);
  for (const auto &[fn, name] : {std::pair{&phi, "phi"}, std::pair{&psi, "psi"}}) {
    const double v0 = fn->value(0, 0.0, 0.0);
    for (std::size_t e = 1; e < n; ++e) {
      const double ve = fn->value(e, 0.0, 0.0);
      if (std::abs(ve - v0) > tol * (1.0 + std::abs(v0)))
        throw ConfigError(std::string(name) + "[" + std::to_string(e) + "]",
                          "not continuous at the central vertex (" + std::to_string(ve) +
                              " vs " + std::to_string(v0) + ")");
    }
  }
}

double b_eps(const MetricStarGraph &graph, double eps, std::size_t e) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("eps must lie in (0, 1), got " + std::to_string(eps));
  const int m = graph.exponent_of_edge(e);
  return std::pow(eps, 2 * m);
}

double b_eps(const ProblemSpec &spec, double eps, std::size_t e) {
  return b_eps(spec.graph, eps, e);
}

// ---------------------------------------------------------------------------

bool CompatibilityReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const CompatibilityCondition &c) { return c.pass; });
}

std::vector<CompatibilityCondition> CompatibilityReport::failures() const {
  std::vector<CompatibilityCondition> out;
  for (const auto &c : conditions)
    if (!c.pass)
      out.push_back(c);
  return out;
}

std::string CompatibilityReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto &c : conditions)
    os << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  [" << c.location
       << "]  residual=" << std::scientific << c.residual << std::defaultfloat << "\n";
  return os.str();
}

double default_compatibility_tol(const ProblemSpec &spec) {
  const bool symbolic = spec.q.symbolic() && spec.f.symbolic() && spec.phi.symbolic() &&
                        spec.psi.symbolic() && spec.mu.symbolic();
  return symbolic ? 1e-8 : 1e-4;
}

namespace {

void add(CompatibilityReport &r, std::string name, std::string location, double residual) {
  r.conditions.push_back({std::move(name), std::move(location), std::abs(residual),
                          std::abs(residual) <= r.tol});
}

std::string at_vertex(std::size_t e) {
  return "a_" + std::to_string(e + 1) + " (edge " + std::to_string(e) + ")";
}

} // namespace

CompatibilityReport check_compatibility_C1(const ProblemSpec &spec, double tol) {
  CompatibilityReport r;
  r.tol = tol < 0.0 ? default_compatibility_tol(spec) : tol;
  const auto &g = spec.graph;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double l = spec.length(e);
    add(r, "phi(a_j) = mu(a_j,0)", at_vertex(e), spec.phi.value(e, l, 0.0) - spec.mu_at(e, 0.0));
    const double dmu = spec.mu.derivative(e, Var::T, 1, l, 0.0, 0.0, l);
    add(r, "psi(a_j) = d_t mu(a_j,0)", at_vertex(e), spec.psi.value(e, l, 0.0) - dmu);
  }
  for (int i = 0; i <= g.k(); ++i) {
    double sum = 0.0;
    for (auto e : g.edges_in(i))
      sum += spec.phi.derivative(e, Var::X, 1, 0.0, 0.0, 0.0, spec.length(e));
    add(r, "sum phi'_e(a) = 0", "G_" + std::to_string(i), sum);
  }
  return r;
}

CompatibilityReport check_compatibility_C2(const ProblemSpec &spec, double tol) {
  CompatibilityReport r;
  r.tol = tol < 0.0 ? default_compatibility_tol(spec) : tol;
  const auto &g = spec.graph;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double l = spec.length(e);
    const double d2mu = spec.mu.derivative(e, Var::T, 2, l, 0.0, 0.0, l);
    const double phi = spec.phi.value(e, l, 0.0);
    const double phi2 = spec.phi.derivative(e, Var::X, 2, l, 0.0, 0.0, l);
    const double qv = spec.q.value(e, l, 0.0);
    const double fv = spec.f.value(e, l, 0.0);
    if (!g.degenerate(e)) {
      add(r, "d_tt mu - phi'' + q phi = f at a_j", at_vertex(e), d2mu - phi2 + qv * phi - fv);
    } else {
      add(r, "d_tt mu + q phi = f at a_j", at_vertex(e), d2mu + qv * phi - fv);
      add(r, "phi''(a_j) = 0", at_vertex(e), phi2);
    }
  }
  for (int i = 0; i <= g.k(); ++i) {
    double sum = 0.0;
    for (auto e : g.edges_in(i))
      sum += spec.psi.derivative(e, Var::X, 1, 0.0, 0.0, 0.0, spec.length(e));
    add(r, "sum psi'_e(a) = 0", "G_" + std::to_string(i), sum);
  }
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double l = spec.length(e);
    add(r, "phi''_e(a) = 0", "edge " + std::to_string(e),
        spec.phi.derivative(e, Var::X, 2, 0.0, 0.0, 0.0, l));
    const double v = spec.q.value(e, 0.0, 0.0) * spec.phi.value(e, 0.0, 0.0) - spec.f.value(e, 0.0, 0.0);
    lo = e == 0 ? v : std::min(lo, v);
    hi = e == 0 ? v : std::max(hi, v);
  }
  add(r, "q phi - f(.,0) continuous at a", "a", hi - lo);
  return r;
}

} // namespace spgraph
