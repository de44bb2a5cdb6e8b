#include "spgraph/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "spgraph/direct_solver.hpp"
#include "spgraph/error.hpp"
#include "spgraph/expansion.hpp"

namespace spgraph {

Norms norms(const Field &a, const Field &b) {
  if (!a.grid().same_layout(b.grid()))
    throw NumericalError("norms: fields live on different grids");
  const auto &g = a.grid();
  const int levels = a.levels();
  const double dT = g.time.stride * g.time.dt();
  Norms out;
  double l2 = 0.0;
  double d1 = 0.0;
  std::vector<double> diff;
  for (std::size_t s = 0; s < a.slots(); ++s) {
    const auto &m = g.edges[s];
    const double h = m.h();
    diff.resize(static_cast<std::size_t>(m.cells + 1));
    for (int k = 0; k < levels; ++k) {
      const double wt = (k == 0 || k == levels - 1) ? 0.5 * dT : dT;
      const auto ra = a.level(s, k);
      const auto rb = b.level(s, k);
      for (std::size_t j = 0; j < diff.size(); ++j) {
        diff[j] = ra[j] - rb[j];
        out.linf = std::max(out.linf, std::abs(diff[j]));
      }
      for (int j = 0; j <= m.cells; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const double wx = (j == 0 || j == m.cells) ? 0.5 * h : h;
        double dx = 0.0;
        if (j == 0)
          dx = (diff[1] - diff[0]) / h;
        else if (j == m.cells)
          dx = (diff[i] - diff[i - 1]) / h;
        else
          dx = (diff[i + 1] - diff[i - 1]) / (2.0 * h);
        l2 += wt * wx * diff[i] * diff[i];
        d1 += wt * wx * dx * dx;
      }
    }
  }
  out.l2 = std::sqrt(l2);
  out.h1x = std::sqrt(l2 + d1);
  return out;
}

PowerFit fit_power_law(const std::vector<double> &eps, const std::vector<double> &err) {
  if (eps.size() != err.size() || eps.size() < 3)
    throw NumericalError("power-law fit needs at least 3 matching points");
  const auto n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0))
      throw NumericalError("power-law fit needs positive values");
    const double x = std::log(eps[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300)
    throw NumericalError("power-law fit needs distinct eps values");
  PowerFit fit;
  fit.order = (n * sxy - sx * sy) / den;
  const double intercept = (sy - fit.order * sx) / n;
  fit.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double r = std::log(err[i]) - intercept - fit.order * std::log(eps[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

void reject_unknown(const json &obj, const std::string &path,
                    std::initializer_list<const char *> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char *k) { return it.key() == k; });
    if (!ok)
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json &require(const json &obj, const char *key, const std::string &path) {
  if (!obj.contains(key))
    throw ConfigError(path.empty() ? key : path + "." + key, "missing required key");
  return obj.at(key);
}

double number(const json &v, const std::string &path) {
  if (!v.is_number())
    throw ConfigError(path, "expected a number");
  return v.get<double>();
}

int integer(const json &v, const std::string &path) {
  if (!v.is_number_integer())
    throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

Expr expression(const json &v, const std::string &path) {
  if (!v.is_string())
    throw ConfigError(path, "expected an expression string");
  try {
    return parse(v.get<std::string>());
  } catch (const ParseError &e) {
    throw ConfigError(path, e.what());
  }
}

GraphFunction expressions(const json &doc, const char *key, std::size_t edges, bool x_allowed,
                          bool t_allowed) {
  const auto &v = require(doc, key, "");
  std::vector<Expr> exprs;
  std::vector<std::string> paths;
  if (v.is_string()) {
    exprs.assign(edges, expression(v, key));
    paths.assign(edges, key);
  } else if (v.is_array()) {
    if (v.size() != edges)
      throw ConfigError(key, "expected " + std::to_string(edges) + " entries, got " +
                                 std::to_string(v.size()));
    for (std::size_t e = 0; e < edges; ++e) {
      paths.push_back(std::string(key) + "[" + std::to_string(e) + "]");
      exprs.push_back(expression(v[e], paths.back()));
    }
  } else {
    throw ConfigError(key, "expected an expression string or an array of them");
  }
  for (std::size_t e = 0; e < edges; ++e) {
    if (!x_allowed && !diff(exprs[e], Var::X).is_zero())
      throw ConfigError(paths[e], "must not depend on x");
    if (!t_allowed && !diff(exprs[e], Var::T).is_zero())
      throw ConfigError(paths[e], "must not depend on t");
  }
  return GraphFunction::from_exprs(std::move(exprs));
}

} // namespace

RunConfig parse_config(const std::string &json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(doc, "",
                 {"graph", "q", "f", "phi", "psi", "mu", "T", "epsilons", "p", "grid", "margin"});

  RunConfig cfg;
  const auto &graph = require(doc, "graph", "");
  if (!graph.is_object())
    throw ConfigError("graph", "expected an object");
  reject_unknown(graph, "graph", {"edges", "exponents"});
  const auto &edges = require(graph, "edges", "graph");
  if (!edges.is_array())
    throw ConfigError("graph.edges", "expected an array");
  std::vector<Edge> edge_list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "graph.edges[" + std::to_string(i) + "]";
    const auto &e = edges[i];
    if (!e.is_object())
      throw ConfigError(path, "expected an object");
    reject_unknown(e, path, {"length", "subgraph"});
    Edge edge;
    edge.length = number(require(e, "length", path), path + ".length");
    edge.subgraph = integer(require(e, "subgraph", path), path + ".subgraph");
    edge_list.push_back(edge);
  }
  std::vector<int> exps;
  if (graph.contains("exponents")) {
    const auto &ex = graph.at("exponents");
    if (!ex.is_array())
      throw ConfigError("graph.exponents", "expected an array");
    for (std::size_t i = 0; i < ex.size(); ++i)
      exps.push_back(integer(ex[i], "graph.exponents[" + std::to_string(i) + "]"));
  }
  cfg.spec.graph = MetricStarGraph(std::move(edge_list), std::move(exps));
  const auto n = cfg.spec.graph.edge_count();
  cfg.spec.q = expressions(doc, "q", n, true, false);
  cfg.spec.f = expressions(doc, "f", n, true, true);
  cfg.spec.phi = expressions(doc, "phi", n, true, false);
  cfg.spec.psi = expressions(doc, "psi", n, true, false);
  cfg.spec.mu = expressions(doc, "mu", n, false, true);
  cfg.spec.T = number(require(doc, "T", ""), "T");
  if (!(cfg.spec.T > 0.0))
    throw ConfigError("T", "time horizon must be positive");

  if (doc.contains("epsilons")) {
    const auto &ev = doc.at("epsilons");
    if (!ev.is_array() || ev.empty())
      throw ConfigError("epsilons", "expected a non-empty array");
    cfg.epsilons.clear();
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string path = "epsilons[" + std::to_string(i) + "]";
      const double eps = number(ev[i], path);
      if (!(eps > 0.0 && eps < 1.0))
        throw ConfigError(path, "eps must lie in (0, 1)");
      cfg.epsilons.push_back(eps);
    }
  }
  if (doc.contains("p")) {
    cfg.p = integer(doc.at("p"), "p");
    if (cfg.p < 0 || cfg.p > kMaxOrder)
      throw ConfigError("p", "order must lie in [0, " + std::to_string(kMaxOrder) + "]");
  }
  if (doc.contains("grid")) {
    const auto &g = doc.at("grid");
    if (!g.is_object())
      throw ConfigError("grid", "expected an object");
    reject_unknown(g, "grid", {"n_per_edge", "cfl"});
    if (g.contains("n_per_edge")) {
      cfg.grid.n_per_edge = integer(g.at("n_per_edge"), "grid.n_per_edge");
      if (cfg.grid.n_per_edge < kMinCells)
        throw ConfigError("grid.n_per_edge", "need at least " + std::to_string(kMinCells));
    }
    if (g.contains("cfl")) {
      cfg.grid.cfl = number(g.at("cfl"), "grid.cfl");
      if (!(cfg.grid.cfl > 0.0 && cfg.grid.cfl <= 1.0))
        throw ConfigError("grid.cfl", "cfl must lie in (0, 1]");
    }
  }
  if (doc.contains("margin")) {
    cfg.margin = number(doc.at("margin"), "margin");
    if (cfg.margin < 0.0)
      throw ConfigError("margin", "margin must be non-negative");
  }
  cfg.spec.validate();
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("cannot open configuration file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

TimeGrid sweep_time_grid(const ProblemSpec &spec, const GridConfig &grid) {
  double shortest = spec.graph.edge(0).length;
  for (const auto &e : spec.graph.edges())
    shortest = std::min(shortest, e.length);
  return make_time_grid(spec.T, grid.cfl * shortest / grid.n_per_edge, grid.snapshots);
}

// ---------------------------------------------------------------------------

ConvergenceReport convergence_sweep(const ProblemSpec &spec, int p,
                                    const std::vector<double> &epsilons, const GridConfig &grid,
                                    double margin, bool parallel) {
  if (epsilons.size() < 3)
    throw ConfigError("epsilons", "a sweep needs at least 3 values");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0))
      throw ConfigError("epsilons[" + std::to_string(i) + "]", "eps must lie in (0, 1)");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ConfigError("epsilons", "values must be strictly decreasing");
  }
  if (spec.graph.k() < 1)
    throw ConfigError("graph.exponents", "a sweep needs at least one degenerate subgraph");

  const TimeGrid fine = sweep_time_grid(spec, grid);
  const TimeGrid coarse = coarsen(fine);
  const auto grids = make_expansion_grids(spec, fine, grid.cfl, std::max(200, grid.n_per_edge));
  const auto es = build_expansion(spec, p, grids);

  auto run_point = [&](double eps) {
    SweepPoint pt;
    pt.eps = eps;
    const Grid g = make_direct_grid(spec.graph, eps, fine, grid.cfl);
    const Field direct = direct_solve(spec, eps, g);
    const Field partial = assemble_partial_sum(es, eps, g);
    pt.error = norms(direct, partial);
    {
      const Grid gc = make_direct_grid(spec.graph, eps, coarse, grid.cfl);
      const Field coarse_direct = direct_solve(spec, eps, gc);
      pt.refinement = norms(direct, resample(coarse_direct, g)).l2 / 3.0;
    }
    const auto r = residuals(es, eps, partial, &direct);
    pt.sup_h = r.sup_h;
    pt.sup_nu = r.sup_nu;
    pt.floor_h = r.floor_h;
    pt.floor_nu = r.floor_nu;
    return pt;
  };

  ConvergenceReport rep;
  rep.p = p;
  rep.margin = margin;
  rep.leading_exponent = spec.graph.exponent(1);
  if (parallel) {
    std::vector<std::future<SweepPoint>> jobs;
    for (double eps : epsilons)
      jobs.push_back(std::async(std::launch::async, run_point, eps));
    for (auto &j : jobs)
      rep.points.push_back(j.get());
  } else {
    for (double eps : epsilons)
      rep.points.push_back(run_point(eps));
  }

  const double m1 = rep.leading_exponent;
  rep.theoretical = (p + 0.5) * m1;
  rep.nu_theoretical = (p + 1.0) * m1;
  std::vector<double> eps_list, l2, nu;
  double smallest_error = rep.points.front().error.l2;
  double largest_refinement = 0.0;
  for (const auto &pt : rep.points) {
    eps_list.push_back(pt.eps);
    l2.push_back(pt.error.l2);
    nu.push_back(pt.sup_nu);
    smallest_error = std::min(smallest_error, pt.error.l2);
    largest_refinement = std::max(largest_refinement, pt.refinement);
  }
  rep.fit = fit_power_law(eps_list, l2);
  rep.nu_fit = fit_power_law(eps_list, nu);
  rep.refinement_ok = largest_refinement <= 0.1 * smallest_error;
  if (!rep.refinement_ok) {
    std::ostringstream os;
    os << "inconclusive: direct-solver discretization error " << largest_refinement
       << " exceeds 10% of the smallest measured error " << smallest_error
       << "; increase grid.n_per_edge";
    rep.note = os.str();
  }
  rep.pass = rep.refinement_ok && rep.fit.order >= rep.theoretical - margin;
  rep.nu_pass = rep.nu_fit.order >= rep.nu_theoretical - margin;
  return rep;
}

namespace {

std::ofstream open_csv(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw NumericalError("cannot write " + path);
  return os;
}

} // namespace

void write_report_csv(const ConvergenceReport &rep, const std::string &path) {
  auto os = open_csv(path);
  os << "epsilon,err_linf,err_l2,err_h1x,fitted_order,theoretical_order,pass\n";
  for (const auto &pt : rep.points)
    os << format_g17(pt.eps) << ',' << format_g17(pt.error.linf) << ','
       << format_g17(pt.error.l2) << ',' << format_g17(pt.error.h1x) << ','
       << format_g17(rep.fit.order) << ',' << format_g17(rep.theoretical) << ','
       << (rep.pass ? "true" : "false") << '\n';
}

void write_residuals_csv(const ConvergenceReport &rep, const std::string &path) {
  auto os = open_csv(path);
  os << "epsilon,sup_h,sup_nu\n";
  for (const auto &pt : rep.points)
    os << format_g17(pt.eps) << ',' << format_g17(pt.sup_h) << ',' << format_g17(pt.sup_nu)
       << '\n';
}

void write_plot_csv(const ConvergenceReport &rep, const std::string &path) {
  auto os = open_csv(path);
  os << "log_eps,log_err_l2,fit_log_err_l2\n";
  for (const auto &pt : rep.points) {
    const double x = std::log(pt.eps);
    os << format_g17(x) << ',' << format_g17(std::log(pt.error.l2)) << ','
       << format_g17(std::log(rep.fit.constant) + rep.fit.order * x) << '\n';
  }
}

std::string summarize(const ConvergenceReport &rep) {
  std::ostringstream os;
  os << "Errors are measured in L2, Linf and an H1-in-x surrogate over the space-time "
        "cylinder, not in the second-order Sobolev norm of the rate estimate.\n";
  os << "p = " << rep.p << ", m_1 = " << rep.leading_exponent << "\n";
  os << "  eps          err_linf     err_l2       err_h1x      refine_est   sup_nu       "
        "sup_h\n";
  char buf[256];
  for (const auto &pt : rep.points) {
    std::snprintf(buf, sizeof buf, "  %-12.4g %-12.4e %-12.4e %-12.4e %-12.4e %-12.4e %-12.4e\n",
                  pt.eps, pt.error.linf, pt.error.l2, pt.error.h1x, pt.refinement, pt.sup_nu,
                  pt.sup_h);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "L2 order %.4f (required >= %.4f, constant %.4g, fit residual %.2e): %s\n",
                rep.fit.order, rep.theoretical - rep.margin, rep.fit.constant, rep.fit.residual,
                rep.pass ? "PASS" : "FAIL");
  os << buf;
  std::snprintf(buf, sizeof buf, "Kirchhoff remainder order %.4f (required >= %.4f): %s\n",
                rep.nu_fit.order, rep.nu_theoretical - rep.margin,
                rep.nu_pass ? "PASS" : "FAIL");
  os << buf;
  if (!rep.note.empty())
    os << rep.note << "\n";
  return os.str();
}

} // namespace spgraph
