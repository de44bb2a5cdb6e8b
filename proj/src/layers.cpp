#include "spgraph/layers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "spgraph/error.hpp"
#include "spgraph/kernels.hpp"

namespace spgraph {

LayerGrid make_layer_grid(const TimeGrid &time, double extra) {
  LayerGrid g;
  g.time = time;
  g.h = time.dt();
  g.cells = static_cast<int>(std::ceil((time.T + extra) / g.h - 1e-9));
  return g;
}

LayerField::LayerField(LayerGrid grid, bool zero) : grid_(std::move(grid)), zero_(zero) {
  if (!zero_)
    values_.assign(static_cast<std::size_t>(grid_.cells + 1) *
                       static_cast<std::size_t>(grid_.time.steps + 1),
                   0.0);
}

double LayerField::operator()(int j, int n) const {
  if (zero_)
    return 0.0;
  return values_[static_cast<std::size_t>(n) * static_cast<std::size_t>(grid_.cells + 1) +
                 static_cast<std::size_t>(j)];
}

double &LayerField::at(int j, int n) {
  if (zero_)
    throw std::logic_error("LayerField::at on a zero layer");
  return values_[static_cast<std::size_t>(n) * static_cast<std::size_t>(grid_.cells + 1) +
                 static_cast<std::size_t>(j)];
}

double LayerField::interpolate(double xi, int n) const {
  if (zero_ || xi > grid_.length() * (1.0 + 1e-12))
    return 0.0;
  const auto stride = static_cast<std::size_t>(grid_.cells + 1);
  return interp_cubic({values_.data() + static_cast<std::size_t>(n) * stride, stride}, grid_.h,
                      std::max(xi, 0.0));
}

namespace {

struct MarchInput {
  double theta = 0.0;
  std::vector<double> alpha, beta; // node samples; empty means zero
  const std::vector<double> *trace = nullptr;
  const std::vector<LayerSource> *sources = nullptr;
};

void check_grid(const LayerGrid &grid) {
  if (grid.cells < 2 || !(grid.h > 0.0))
    throw NumericalError("layer grid needs at least 3 nodes");
  if (grid.length() < grid.time.T + 2.0 - 1e-9)
    throw NumericalError("layer grid length " + std::to_string(grid.length()) +
                         " is shorter than T + 2; the layer would reach the far boundary");
  if (grid.time.dt() > grid.h * (1.0 + 1e-12))
    throw CflError("layer grid: dt exceeds the fast-coordinate step");
}

LayerField march(const LayerGrid &grid, const MarchInput &in) {
  check_grid(grid);
  const int cells = grid.cells;
  const int steps = grid.time.steps;
  const double dt = grid.time.dt();
  const double dt2 = dt * dt;
  const double c = dt2 / (grid.h * grid.h);
  const double damp = 1.0 + 0.5 * in.theta * dt2;
  const auto nodes = static_cast<std::size_t>(cells + 1);

  auto trace = [&](int n) { return (in.trace && !in.trace->empty()) ? (*in.trace)[static_cast<std::size_t>(n)] : 0.0; };

  struct Term {
    double c;
    std::vector<double> weight;
    const LayerField *field;
  };
  std::vector<Term> terms;
  if (in.sources) {
    for (const auto &s : *in.sources) {
      if (!s.field || s.field->zero() || s.coefficient == 0.0)
        continue;
      if (!(s.field->grid() == grid))
        throw NumericalError("layer source lives on a different grid");
      Term t{s.coefficient, std::vector<double>(nodes), s.field};
      for (std::size_t j = 0; j < nodes; ++j)
        t.weight[j] = std::pow(grid.xi(static_cast<int>(j)), s.power);
      terms.push_back(std::move(t));
    }
  }

  LayerField out(grid, false);
  std::vector<double> prev(nodes, 0.0), cur(nodes, 0.0), next(nodes, 0.0), src(nodes, 0.0);
  if (!in.alpha.empty())
    cur = in.alpha;
  cur[0] = in.alpha.empty() ? trace(0) : in.alpha[0];
  cur[nodes - 1] = 0.0;

  auto source = [&](int n) {
    std::fill(src.begin(), src.end(), 0.0);
    for (const auto &t : terms)
      for (int j = 1; j < cells; ++j)
        src[static_cast<std::size_t>(j)] += t.c * t.weight[static_cast<std::size_t>(j)] * (*t.field)(j, n);
  };
  auto store = [&](int n) {
    for (int j = 0; j <= cells; ++j)
      out.at(j, n) = cur[static_cast<std::size_t>(j)];
  };
  store(0);

  for (int n = 0; n < steps; ++n) {
    source(n);
    for (int j = 1; j < cells; ++j) {
      const auto i = static_cast<std::size_t>(j);
      const double lap = c * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]);
      if (n == 0) {
        const double b = in.beta.empty() ? 0.0 : in.beta[i];
        next[i] = cur[i] + dt * b + 0.5 * (lap + dt2 * (src[i] - in.theta * cur[i]));
      } else {
        next[i] = (2.0 * cur[i] - damp * prev[i] + lap + dt2 * src[i]) / damp;
      }
    }
    next[0] = in.alpha.empty() ? trace(n + 1) : 0.0;
    next[nodes - 1] = 0.0;
    std::swap(prev, cur);
    std::swap(cur, next);
    store(n + 1);
  }
  return out;
}

double adaptive_simpson(const std::function<double(double)> &g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
    return left + right + diff / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

LayerField qp_solve(const QuarterPlaneProblem &prob, const LayerGrid &grid) {
  const auto steps = static_cast<std::size_t>(grid.time.steps) + 1;
  if (!prob.trace.empty() && prob.trace.size() != steps)
    throw NumericalError("layer trace must have one value per time step");
  bool trivial = true;
  for (double g : prob.trace)
    if (g != 0.0)
      trivial = false;
  for (const auto &s : prob.sources) {
    if (s.power < 1)
      throw NumericalError("layer source powers must be positive");
    if (s.field && !s.field->zero() && s.coefficient != 0.0)
      trivial = false;
  }
  check_grid(grid);
  if (trivial)
    return LayerField(grid, true);
  if (!prob.trace.empty()) {
    double scale = 1.0;
    for (double g : prob.trace)
      scale = std::max(scale, std::abs(g));
    if (std::abs(prob.trace.front()) > 1e-8 * scale)
      throw NumericalError("layer trace does not vanish at t = 0 (value " +
                           std::to_string(prob.trace.front()) + ")");
  }
  MarchInput in;
  in.theta = prob.theta;
  in.trace = &prob.trace;
  in.sources = &prob.sources;
  return march(grid, in);
}

LayerField qp_solve_initial(double theta, const std::function<double(double)> &alpha,
                            const std::function<double(double)> &beta, const LayerGrid &grid) {
  MarchInput in;
  in.theta = theta;
  const auto nodes = static_cast<std::size_t>(grid.cells + 1);
  in.alpha.resize(nodes);
  in.beta.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    in.alpha[j] = alpha(grid.xi(static_cast<int>(j)));
    in.beta[j] = beta(grid.xi(static_cast<int>(j)));
  }
  return march(grid, in);
}

double qp_oracle_below_characteristic(double theta, const std::function<double(double)> &alpha,
                                      const std::function<double(double)> &beta, double s,
                                      double t) {
  if (!(s - t > 0.0))
    throw std::domain_error("qp_oracle_below_characteristic requires s - t > 0");
  if (t == 0.0)
    return alpha(s);
  auto integrand = [&](double y) {
    const double d = s - y;
    const double k = kernels::phi_entire(theta * (t * t - d * d));
    return k * beta(y) + kernels::dt_kernel(-theta, t, s, y) * alpha(y);
  };
  const std::function<double(double)> g = integrand;
  const double a = s - t;
  const double b = s + t;
  const double fa = g(a);
  const double fm = g(0.5 * (a + b));
  const double fb = g(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double integral = adaptive_simpson(g, a, b, fa, fm, fb, whole, 1e-10, 40);
  return 0.5 * (alpha(s + t) + alpha(s - t)) + 0.5 * integral;
}

std::vector<double> boundary_flux(const LayerField &fld) {
  const auto &g = fld.grid();
  if (g.cells < 2)
    throw NumericalError("boundary_flux needs at least 3 nodes");
  std::vector<double> out(static_cast<std::size_t>(g.time.steps) + 1, 0.0);
  if (fld.zero())
    return out;
  for (int n = 0; n <= g.time.steps; ++n)
    out[static_cast<std::size_t>(n)] = (-3.0 * fld(0, n) + 4.0 * fld(1, n) - fld(2, n)) / (2.0 * g.h);
  return out;
}

namespace {

double fast_coordinate(LayerSide side, double eps, int m, double length, double tau) {
  if (!(tau >= -1e-12 * length && tau <= length * (1.0 + 1e-12)))
    throw std::out_of_range("arclength " + std::to_string(tau) + " outside the edge");
  const double d = side == LayerSide::Vertex ? tau : length - tau;
  return std::max(d, 0.0) / std::pow(eps, m);
}

} // namespace

double evaluate_physical(const LayerField &fld, LayerSide side, double eps, int m, double length,
                         double tau, int n) {
  const double xi = fast_coordinate(side, eps, m, length, tau);
  return fld.interpolate(xi, n);
}

double evaluate_physical_at(const LayerField &fld, LayerSide side, double eps, int m,
                            double length, double tau, double t) {
  const double xi = fast_coordinate(side, eps, m, length, tau);
  if (fld.zero())
    return 0.0;
  const auto &tg = fld.grid().time;
  if (t < -1e-12 || t > tg.T * (1.0 + 1e-12))
    throw std::out_of_range("time outside [0, T]");
  const double pos = t / tg.dt();
  const double r = std::round(pos);
  if (std::abs(pos - r) < 1e-9)
    return fld.interpolate(xi, static_cast<int>(r));
  const int n0 = std::clamp(static_cast<int>(std::floor(pos)) - 1, 0, std::max(tg.steps - 3, 0));
  std::array<double, 4> v{};
  const int count = std::min(4, tg.steps + 1);
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] = fld.interpolate(xi, n0 + i);
  return interp_cubic({v.data(), static_cast<std::size_t>(count)}, tg.dt(), t - n0 * tg.dt());
}

void write_layer_csv(const LayerField &fld, const std::string &path, int stride) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw NumericalError("cannot write " + path);
  os << "xi,t,v\n";
  const auto &g = fld.grid();
  for (int n = 0; n <= g.time.steps; n += std::max(stride, 1))
    for (int j = 0; j <= g.cells; ++j)
      os << format_g17(g.xi(j)) << ',' << format_g17(g.time.time(n)) << ',' << format_g17(fld(j, n))
         << '\n';
}

} // namespace spgraph
