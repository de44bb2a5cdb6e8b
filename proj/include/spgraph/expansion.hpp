#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spgraph/field.hpp"
#include "spgraph/graph.hpp"
#include "spgraph/layers.hpp"
#include "spgraph/limit_solver.hpp"

namespace spgraph {

/// Pairs (n, i) with n * m_i = p, n >= 1, 1 <= i <= k, ordered by i. `exponents` lists
/// m_1 .. m_k.
std::vector<std::pair<int, int>> lambda_set(const std::vector<int> &exponents, int p);

struct ExpansionGrids {
  TimeGrid time;
  Grid g0;          // G_0 edges, b = 1
  int u_cells = 200; // mesh for the regular terms on each degenerate edge
  LayerGrid layer;
};

/// Grids sharing `time`; the G_0 mesh matches make_direct_grid on the G_0 edges.
ExpansionGrids make_expansion_grids(const ProblemSpec &spec, const TimeGrid &time, double cfl,
                                    int u_cells);

/// Term families. The rank orders the phases within one power of eps.
enum class Family { Regular = 0, Bulk = 1, VertexLayer = 2, EndLayer = 3 };

std::string family_name(Family f);

/// Bulk terms on G_0 are indexed by (power, subgraph feeding their Kirchhoff data; 0 for the
/// leading term); the others by (power, edge). Regular terms live at powers s * m_i.
struct TermKey {
  Family family = Family::Bulk;
  int power = 0;
  std::size_t index = 0;

  auto operator<=>(const TermKey &) const = default;
  std::string to_string() const;
};

struct BuildEvent {
  TermKey key;
  std::vector<TermKey> inputs;
  bool zero = false;
};

/// Terms of the expansion up to eps^max_power with max_power = (p + 1) m_1 - 1.
struct ExpansionSet {
  int p = 0;
  int max_power = 0;
  ProblemSpec spec;
  ExpansionGrids grids;

  std::map<std::pair<int, int>, Field> bulk;                     // (power, subgraph)
  std::map<std::pair<int, std::size_t>, EdgeODESolution> regular; // (order s, edge)
  std::map<std::pair<int, std::size_t>, LayerField> vertex;       // (power, edge)
  std::map<std::pair<int, std::size_t>, LayerField> end;          // (power, edge)
  std::vector<BuildEvent> log;

  bool has(const TermKey &key) const;
  std::size_t term_count() const { return log.size(); }
};

inline constexpr int kMaxOrder = 4;

/// Builds every term in order of increasing power; within one power regular terms come first,
/// then bulk terms, vertex layers and end layers. Throws CompatibilityError on incompatible
/// data, ConfigError for p outside [0, 4] or a graph without G_0 edges.
ExpansionSet build_expansion(const ProblemSpec &spec, int p, const ExpansionGrids &grids);

/// Empty string when every consumed term was produced earlier in the log, at a lower power or
/// in an earlier phase of the same power; otherwise a description of the first violation.
std::string check_schedule(const ExpansionSet &es);

/// Partial sum on a direct-solver grid with the same time grid. Throws NumericalError when a
/// degenerate edge's step exceeds eps^m / 8 or the time grids differ.
Field assemble_partial_sum(const ExpansionSet &es, double eps, const Grid &grid);

struct Residuals {
  double sup_h = 0.0;      // sup over interior nodes and stored levels
  double sup_nu = 0.0;     // sup over stored levels
  std::vector<double> nu;  // Kirchhoff remainder at each stored level
  double floor_h = 0.0;    // same operators applied to a reference field
  double floor_nu = 0.0;
};

/// d_tt u - b d_xx u + q u - f at interior nodes (centred differences over stored levels) and
/// sum_e b_e d_x u_e(a) by one-sided differences. The floors come from `reference` when given.
Residuals residuals(const ExpansionSet &es, double eps, const Field &assembled,
                    const Field *reference = nullptr);

/// Operator residuals of any field on a direct-solver grid.
std::pair<double, std::vector<double>> field_residuals(const ProblemSpec &spec, double eps,
                                                       const Field &fld);

/// One CSV per term into `dir` (created if missing); layers and regular terms every `stride`
/// time steps.
void export_terms(const ExpansionSet &es, const std::string &dir, int stride);

} // namespace spgraph
