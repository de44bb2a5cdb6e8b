#include "spgraph/expansion.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "spgraph/error.hpp"

namespace spgraph {

std::vector<std::pair<int, int>> lambda_set(const std::vector<int> &exponents, int p) {
  std::vector<std::pair<int, int>> out;
  if (p < 1)
    return out;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const int m = exponents[i];
    if (m > 0 && p % m == 0)
      out.emplace_back(p / m, static_cast<int>(i) + 1);
  }
  return out;
}

ExpansionGrids make_expansion_grids(const ProblemSpec &spec, const TimeGrid &time, double cfl,
                                    int u_cells) {
  ExpansionGrids g;
  g.time = time;
  g.g0 = make_g0_grid(spec.graph, time, cfl);
  g.u_cells = u_cells;
  g.layer = make_layer_grid(time);
  return g;
}

std::string family_name(Family f) {
  switch (f) {
  case Family::Regular:
    return "u";
  case Family::Bulk:
    return "U";
  case Family::VertexLayer:
    return "v";
  case Family::EndLayer:
    return "w";
  }
  return "?";
}

std::string TermKey::to_string() const {
  return family_name(family) + "[power=" + std::to_string(power) +
         (family == Family::Bulk ? ", subgraph=" : ", edge=") + std::to_string(index) + "]";
}

bool ExpansionSet::has(const TermKey &key) const {
  for (const auto &ev : log)
    if (ev.key == key)
      return true;
  return false;
}

namespace {

bool all_zero(const Field &fld) {
  for (double v : fld.trace())
    if (v != 0.0)
      return false;
  for (std::size_t s = 0; s < fld.slots(); ++s)
    for (int k = 0; k < fld.levels(); ++k)
      for (double v : fld.level(s, k))
        if (v != 0.0)
          return false;
  return true;
}

double factorial(int r) {
  double f = 1.0;
  for (int i = 2; i <= r; ++i)
    f *= i;
  return f;
}

// Kirchhoff data of correction terms come from discrete layer fluxes and one-sided slopes.
constexpr double kDerivedFluxTol = 1e-4;

class Builder {
public:
  Builder(ExpansionSet &es) : es_(es), graph_(es.spec.graph), steps_(es.grids.time.steps) {}

  void run() {
    for (int P = 0; P <= es_.max_power; ++P) {
      regular_phase(P);
      bulk_phase(P);
      vertex_phase(P);
      end_phase(P);
    }
  }

private:
  ExpansionSet &es_;
  const MetricStarGraph &graph_;
  int steps_;

  void record(TermKey key, std::vector<TermKey> inputs, bool zero) {
    es_.log.push_back({key, std::move(inputs), zero});
  }

  void regular_phase(int P) {
    const auto &spec = es_.spec;
    for (auto e : graph_.degenerate_edges()) {
      const int m = graph_.exponent_of_edge(e);
      if (P % m != 0)
        continue;
      const int s = P / m;
      const TermKey key{Family::Regular, P, e};
      EdgeODESolution sol;
      std::vector<TermKey> inputs;
      if (s == 0) {
        sol = solve_degenerate_edge(spec, e, es_.grids.u_cells, es_.grids.time);
      } else if (s == 1) {
        sol = zero_edge_solution(e, 1, spec.length(e), es_.grids.u_cells, es_.grids.time);
      } else {
        inputs.push_back({Family::Regular, P - 2 * m, e});
        sol = solve_cauchy_recursive(spec, e, es_.regular.at({s - 2, e}), s);
      }
      const bool zero = sol.zero;
      es_.regular.emplace(std::make_pair(s, e), std::move(sol));
      record(key, std::move(inputs), zero);
    }
  }

  void bulk_phase(int P) {
    const auto &g0grid = es_.grids.g0;
    if (P == 0) {
      G0Problem prob{es_.spec, false, {}};
      auto fld = solve_g0(prob, g0grid);
      const bool zero = all_zero(fld);
      es_.bulk.emplace(std::make_pair(0, 0), std::move(fld));
      record({Family::Bulk, 0, 0}, {}, zero);
      return;
    }
    for (int l = 1; l <= graph_.k(); ++l) {
      const int m = graph_.exponent(l);
      if (P < m)
        continue;
      std::vector<TermKey> inputs;
      std::vector<double> nu(static_cast<std::size_t>(steps_) + 1, 0.0);
      for (auto e : graph_.edges_in(l)) {
        if (auto it = es_.vertex.find({P - m, e}); it != es_.vertex.end()) {
          inputs.push_back({Family::VertexLayer, P - m, e});
          const auto flux = boundary_flux(it->second);
          for (std::size_t n = 0; n < nu.size(); ++n)
            nu[n] -= flux[n];
        }
        const int rp = P - 2 * m;
        if (rp >= 0 && rp % m == 0) {
          if (auto it = es_.regular.find({rp / m, e}); it != es_.regular.end()) {
            inputs.push_back({Family::Regular, rp, e});
            for (int n = 0; n <= steps_; ++n)
              nu[static_cast<std::size_t>(n)] -= it->second.dx_at_vertex(n);
          }
        }
      }
      if (inputs.empty())
        continue;
      G0Problem prob{es_.spec, true, std::move(nu), kDerivedFluxTol};
      auto fld = solve_g0(prob, g0grid);
      const bool zero = all_zero(fld);
      es_.bulk.emplace(std::make_pair(P, l), std::move(fld));
      record({Family::Bulk, P, static_cast<std::size_t>(l)}, std::move(inputs), zero);
    }
  }

  void add_sources(QuarterPlaneProblem &qp, std::vector<TermKey> &inputs, Family family,
                   const std::map<std::pair<int, std::size_t>, LayerField> &store, int P,
                   std::size_t e, double x, double sign) {
    const int m = graph_.exponent_of_edge(e);
    const double len = es_.spec.length(e);
    for (int r = 1; P - r * m >= 0; ++r) {
      auto it = store.find({P - r * m, e});
      if (it == store.end())
        continue;
      inputs.push_back({family, P - r * m, e});
      const double dq = es_.spec.q.derivative(e, Var::X, r, x, 0.0, 0.0, len);
      const double c = -dq * std::pow(sign, r) / factorial(r);
      qp.sources.push_back({c, r, &it->second});
    }
  }

  void vertex_phase(int P) {
    const auto &spec = es_.spec;
    for (auto e : graph_.degenerate_edges()) {
      const int m = graph_.exponent_of_edge(e);
      QuarterPlaneProblem qp;
      qp.theta = spec.q.value(e, 0.0, 0.0);
      qp.trace.assign(static_cast<std::size_t>(steps_) + 1, 0.0);
      std::vector<TermKey> inputs;
      for (const auto &[key, fld] : es_.bulk) {
        if (key.first != P)
          continue;
        inputs.push_back({Family::Bulk, P, static_cast<std::size_t>(key.second)});
        for (std::size_t n = 0; n < qp.trace.size(); ++n)
          qp.trace[n] += fld.trace()[n];
      }
      if (P % m == 0) {
        const auto &u = es_.regular.at({P / m, e});
        inputs.push_back({Family::Regular, P, e});
        for (int n = 0; n <= steps_; ++n)
          qp.trace[static_cast<std::size_t>(n)] -= u(0, n);
      }
      add_sources(qp, inputs, Family::VertexLayer, es_.vertex, P, e, 0.0, 1.0);
      if (inputs.empty())
        continue;
      check_start(qp, {Family::VertexLayer, P, e});
      auto fld = qp_solve(qp, es_.grids.layer);
      const bool zero = fld.zero();
      es_.vertex.emplace(std::make_pair(P, e), std::move(fld));
      record({Family::VertexLayer, P, e}, std::move(inputs), zero);
    }
  }

  void end_phase(int P) {
    const auto &spec = es_.spec;
    for (auto e : graph_.degenerate_edges()) {
      const int m = graph_.exponent_of_edge(e);
      if (P % m != 0)
        continue;
      const int s = P / m;
      const double len = spec.length(e);
      QuarterPlaneProblem qp;
      qp.theta = spec.q.value(e, len, 0.0);
      qp.trace.assign(static_cast<std::size_t>(steps_) + 1, 0.0);
      std::vector<TermKey> inputs{{Family::Regular, P, e}};
      const auto &u = es_.regular.at({s, e});
      for (int n = 0; n <= steps_; ++n) {
        double g = -u.at_far_end(n);
        if (s == 0)
          g += spec.mu_at(e, es_.grids.time.time(n));
        qp.trace[static_cast<std::size_t>(n)] = g;
      }
      // Folded coordinate z = (length - x) / eps^m, so x - length = -eps^m z.
      add_sources(qp, inputs, Family::EndLayer, es_.end, P, e, len, -1.0);
      check_start(qp, {Family::EndLayer, P, e});
      auto fld = qp_solve(qp, es_.grids.layer);
      const bool zero = fld.zero();
      es_.end.emplace(std::make_pair(P, e), std::move(fld));
      record({Family::EndLayer, P, e}, std::move(inputs), zero);
    }
  }

  static void check_start(const QuarterPlaneProblem &qp, const TermKey &key) {
    double scale = 1.0;
    for (double g : qp.trace)
      scale = std::max(scale, std::abs(g));
    if (!qp.trace.empty() && std::abs(qp.trace.front()) > 1e-8 * scale)
      throw CompatibilityError("boundary trace of " + key.to_string() +
                               " does not vanish at t = 0: " + std::to_string(qp.trace.front()));
  }
};

} // namespace

ExpansionSet build_expansion(const ProblemSpec &spec, int p, const ExpansionGrids &grids) {
  if (p < 0 || p > kMaxOrder)
    throw ConfigError("p", "order must lie in [0, " + std::to_string(kMaxOrder) + "]");
  spec.validate();
  if (spec.graph.edges_in(0).empty())
    throw ConfigError("graph.edges", "at least one edge must belong to subgraph 0");
  const auto report = check_compatibility_C1(spec);
  if (!report.pass())
    throw CompatibilityError("initial and boundary data are incompatible:\n" + report.to_text());
  if (grids.g0.time.steps != grids.time.steps || !(grids.layer.time.steps == grids.time.steps))
    throw NumericalError("expansion grids do not share one time grid");

  ExpansionSet es;
  es.p = p;
  es.spec = spec;
  es.grids = grids;
  es.max_power = spec.graph.k() == 0 ? 0 : (p + 1) * spec.graph.exponent(1) - 1;
  Builder(es).run();
  if (auto why = check_schedule(es); !why.empty())
    throw NumericalError("expansion schedule violated: " + why);
  return es;
}

std::string check_schedule(const ExpansionSet &es) {
  std::set<TermKey> done;
  for (const auto &ev : es.log) {
    for (const auto &in : ev.inputs) {
      if (!done.count(in))
        return ev.key.to_string() + " consumes " + in.to_string() + " before it is built";
      const bool earlier_power = in.power < ev.key.power;
      const bool earlier_phase = in.power == ev.key.power &&
                                 static_cast<int>(in.family) < static_cast<int>(ev.key.family);
      if (!(earlier_power || earlier_phase))
        return ev.key.to_string() + " consumes " + in.to_string() + " from the same phase";
    }
    if (!done.insert(ev.key).second)
      return ev.key.to_string() + " built twice";
  }
  return {};
}

Field assemble_partial_sum(const ExpansionSet &es, double eps, const Grid &grid) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("eps must lie in (0, 1)");
  const auto &tg = es.grids.time;
  if (grid.time.steps != tg.steps || grid.time.stride != tg.stride ||
      std::abs(grid.time.T - tg.T) > 1e-14)
    throw NumericalError("evaluation grid uses a different time grid");
  const auto &graph = es.spec.graph;
  std::vector<double> pw(static_cast<std::size_t>(es.max_power) + 1);
  for (std::size_t P = 0; P < pw.size(); ++P)
    pw[P] = std::pow(eps, static_cast<double>(P));

  Field out(grid);
  auto &trace = out.trace();
  for (const auto &[key, fld] : es.bulk)
    for (std::size_t n = 0; n < trace.size(); ++n)
      trace[n] += pw[static_cast<std::size_t>(key.first)] * fld.trace()[n];

  for (std::size_t s = 0; s < grid.edges.size(); ++s) {
    const auto &mesh = grid.edges[s];
    const std::size_t e = mesh.edge;
    if (!graph.degenerate(e)) {
      for (const auto &[key, fld] : es.bulk) {
        const double c = pw[static_cast<std::size_t>(key.first)];
        const auto src_slot = fld.grid().slot_of(e);
        const auto &src_mesh = fld.grid().edges[src_slot];
        for (int k = 0; k < out.levels(); ++k) {
          auto row = out.level(s, k);
          const auto from = fld.level(src_slot, k);
          if (src_mesh.cells == mesh.cells) {
            for (std::size_t j = 0; j < row.size(); ++j)
              row[j] += c * from[j];
          } else {
            for (int j = 0; j <= mesh.cells; ++j)
              row[static_cast<std::size_t>(j)] += c * interp_cubic(from, src_mesh.h(), mesh.x(j));
          }
        }
      }
      continue;
    }
    const int m = graph.exponent_of_edge(e);
    const double scale = std::pow(eps, m);
    if (mesh.h() > scale / 8.0 * (1.0 + 1e-12))
      throw NumericalError("evaluation grid too coarse on edge " + std::to_string(e) +
                           ": h = " + std::to_string(mesh.h()) + " > eps^m / 8");
    const double len = mesh.length;
    const double reach = es.grids.layer.length() * scale;
    for (int k = 0; k < out.levels(); ++k) {
      const int n = k * tg.stride;
      auto row = out.level(s, k);
      for (int j = 0; j <= mesh.cells; ++j) {
        const double x = mesh.x(j);
        double v = 0.0;
        for (const auto &[key, u] : es.regular)
          if (key.second == e && !u.zero)
            v += pw[static_cast<std::size_t>(key.first * m)] * u.at(x, n);
        if (x <= reach)
          for (const auto &[key, layer] : es.vertex)
            if (key.second == e && !layer.zero())
              v += pw[static_cast<std::size_t>(key.first)] * layer.interpolate(x / scale, n);
        if (len - x <= reach)
          for (const auto &[key, layer] : es.end)
            if (key.second == e && !layer.zero())
              v += pw[static_cast<std::size_t>(key.first)] *
                   layer.interpolate((len - x) / scale, n);
        row[static_cast<std::size_t>(j)] = v;
      }
    }
  }
  return out;
}

std::pair<double, std::vector<double>> field_residuals(const ProblemSpec &spec, double eps,
                                                       const Field &fld) {
  const auto &g = fld.grid();
  const double dT = g.time.stride * g.time.dt();
  const int levels = fld.levels();
  double sup_h = 0.0;
  std::vector<double> nu(static_cast<std::size_t>(levels), 0.0);
  for (std::size_t s = 0; s < fld.slots(); ++s) {
    const auto &m = g.edges[s];
    const double b = eps == 1.0 ? 1.0 : b_eps(spec, eps, m.edge);
    const double h = m.h();
    std::vector<double> q(static_cast<std::size_t>(m.cells + 1));
    for (int j = 0; j <= m.cells; ++j)
      q[static_cast<std::size_t>(j)] = spec.q.value(m.edge, m.x(j), 0.0);
    for (int k = 0; k < levels; ++k) {
      const auto u = fld.level(s, k);
      nu[static_cast<std::size_t>(k)] += b * one_sided_derivative(u, h);
      if (k == 0 || k == levels - 1)
        continue;
      const auto up = fld.level(s, k + 1);
      const auto um = fld.level(s, k - 1);
      const double t = g.time.stored_time(k);
      for (int j = 1; j < m.cells; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const double utt = (up[i] - 2.0 * u[i] + um[i]) / (dT * dT);
        const double uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        const double r = utt - b * uxx + q[i] * u[i] - spec.f.value(m.edge, m.x(j), t);
        sup_h = std::max(sup_h, std::abs(r));
      }
    }
  }
  return {sup_h, nu};
}

Residuals residuals(const ExpansionSet &es, double eps, const Field &assembled,
                    const Field *reference) {
  Residuals r;
  auto [h, nu] = field_residuals(es.spec, eps, assembled);
  r.sup_h = h;
  r.nu = std::move(nu);
  for (double v : r.nu)
    r.sup_nu = std::max(r.sup_nu, std::abs(v));
  if (reference) {
    auto [fh, fnu] = field_residuals(es.spec, eps, *reference);
    r.floor_h = fh;
    for (double v : fnu)
      r.floor_nu = std::max(r.floor_nu, std::abs(v));
  }
  return r;
}

void export_terms(const ExpansionSet &es, const std::string &dir, int stride) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  stride = std::max(stride, 1);
  for (const auto &[key, fld] : es.bulk)
    for (std::size_t s = 0; s < fld.slots(); ++s)
      write_field_csv(fld, s,
                      (fs::path(dir) / ("U_p" + std::to_string(key.first) + "_g" +
                                        std::to_string(key.second) + "_edge" +
                                        std::to_string(fld.grid().edges[s].edge) + ".csv"))
                          .string());
  for (const auto &[key, u] : es.regular) {
    const auto path = fs::path(dir) / ("u_s" + std::to_string(key.first) + "_edge" +
                                       std::to_string(key.second) + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw NumericalError("cannot write " + path.string());
    os << "tau,t,u\n";
    for (int n = 0; n <= u.time.steps; n += stride)
      for (int j = 0; j <= u.cells; ++j)
        os << format_g17(u.x(j)) << ',' << format_g17(u.time.time(n)) << ','
           << format_g17(u(j, n)) << '\n';
  }
  for (const auto &[key, v] : es.vertex)
    write_layer_csv(v,
                    (fs::path(dir) / ("v_p" + std::to_string(key.first) + "_edge" +
                                      std::to_string(key.second) + ".csv"))
                        .string(),
                    stride);
  for (const auto &[key, w] : es.end)
    write_layer_csv(w,
                    (fs::path(dir) / ("w_p" + std::to_string(key.first) + "_edge" +
                                      std::to_string(key.second) + ".csv"))
                        .string(),
                    stride);
}

} // namespace spgraph
