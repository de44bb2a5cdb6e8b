#pragma once

#include <string>
#include <vector>

#include "spgraph/graph.hpp"

namespace testing {

inline spgraph::GraphFunction exprs(const std::vector<std::string> &src) {
  std::vector<spgraph::Expr> out;
  for (const auto &s : src)
    out.push_back(spgraph::parse(s));
  return spgraph::GraphFunction::from_exprs(std::move(out));
}

inline spgraph::GraphFunction all(const std::string &src, std::size_t n) {
  return spgraph::GraphFunction::uniform(spgraph::parse(src), n);
}

// Star with the given edges and zero data.
inline spgraph::ProblemSpec zero_problem(std::vector<spgraph::Edge> edges, std::vector<int> exps,
                                         double T = 1.0) {
  spgraph::ProblemSpec spec;
  const auto n = edges.size();
  spec.graph = spgraph::MetricStarGraph(std::move(edges), std::move(exps));
  spec.q = spgraph::GraphFunction::zero(n);
  spec.f = spgraph::GraphFunction::zero(n);
  spec.phi = spgraph::GraphFunction::zero(n);
  spec.psi = spgraph::GraphFunction::zero(n);
  spec.mu = spgraph::GraphFunction::zero(n);
  spec.T = T;
  return spec;
}

// Three unit edges in G_0, G_1 (m = 1), G_2 (m = 2) with the reference data.
inline spgraph::ProblemSpec reference_problem() {
  auto spec = zero_problem({{1.0, 0}, {1.0, 1}, {1.0, 2}}, {1, 2}, 1.5);
  spec.q = all("1 + x", 3);
  spec.f = all("sin(t) * (1 + x)", 3);
  spec.phi = all("cos(pi * x / 2)", 3);
  return spec;
}

} // namespace testing
