#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "spgraph/direct_solver.hpp"
#include "spgraph/error.hpp"
#include "spgraph/expansion.hpp"
#include "spgraph/harness.hpp"

namespace spgraph {

namespace {

constexpr int kMaxCsvNodes = 2000;

struct Options {
  std::string config;
  std::string out = ".";
  double eps = -1.0;
  int p = -1;
  bool serial = false;
};

double pick_eps(const Options &opt, const RunConfig &cfg) {
  const double eps = opt.eps >= 0.0 ? opt.eps : cfg.epsilons.front();
  if (!(eps > 0.0 && eps < 1.0))
    throw ConfigError("eps", "eps must lie in (0, 1), got " + format_g17(eps));
  return eps;
}

int pick_order(const Options &opt, const RunConfig &cfg) {
  const int p = opt.p >= 0 ? opt.p : cfg.p;
  if (p > kMaxOrder)
    throw ConfigError("p", "order must lie in [0, " + std::to_string(kMaxOrder) + "]");
  return p;
}

void write_fields(const Field &fld, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t s = 0; s < fld.slots(); ++s) {
    const int cells = fld.grid().edges[s].cells;
    const int stride = std::max(1, (cells + kMaxCsvNodes - 1) / kMaxCsvNodes);
    write_field_csv(fld, s, (dir / ("field_" + std::to_string(fld.grid().edges[s].edge) + ".csv")).string(),
                    stride);
  }
  write_trace_csv(fld, (dir / "trace.csv").string());
}

int cmd_check(const Options &opt) {
  const auto cfg = load_config(opt.config);
  const auto c1 = check_compatibility_C1(cfg.spec);
  const auto c2 = check_compatibility_C2(cfg.spec);
  std::cout << "First-order compatibility (required):\n" << c1.to_text();
  std::cout << "Second-order compatibility (informational):\n" << c2.to_text();
  if (!c1.pass()) {
    for (const auto &f : c1.failures())
      std::cout << "FAILED: " << f.name << " at " << f.location << "\n";
    return 1;
  }
  std::cout << "compatibility: ok\n";
  return 0;
}

int cmd_solve(const Options &opt) {
  const auto cfg = load_config(opt.config);
  const double eps = pick_eps(opt, cfg);
  const auto tg = sweep_time_grid(cfg.spec, cfg.grid);
  const auto grid = make_direct_grid(cfg.spec.graph, eps, tg, cfg.grid.cfl);
  const auto fld = direct_solve(cfg.spec, eps, grid);
  write_fields(fld, opt.out);
  std::cout << "eps = " << eps << ", steps = " << tg.steps << ", energy " << energy(fld, cfg.spec, eps, 0)
            << " -> " << energy(fld, cfg.spec, eps, fld.levels() - 1) << "\n";
  return 0;
}

int cmd_expand(const Options &opt) {
  const auto cfg = load_config(opt.config);
  const int p = pick_order(opt, cfg);
  const auto tg = sweep_time_grid(cfg.spec, cfg.grid);
  const auto grids =
      make_expansion_grids(cfg.spec, tg, cfg.grid.cfl, std::max(200, cfg.grid.n_per_edge));
  const auto es = build_expansion(cfg.spec, p, grids);
  const std::filesystem::path out(opt.out);
  export_terms(es, (out / "terms").string(), tg.stride);
  for (const auto &ev : es.log)
    std::cout << ev.key.to_string() << (ev.zero ? " (zero)" : "") << "\n";
  if (opt.eps >= 0.0) {
    const double eps = pick_eps(opt, cfg);
    const auto grid = make_direct_grid(cfg.spec.graph, eps, tg, cfg.grid.cfl);
    write_fields(assemble_partial_sum(es, eps, grid), out);
  }
  return 0;
}

int cmd_verify(const Options &opt) {
  const auto cfg = load_config(opt.config);
  const int p = pick_order(opt, cfg);
  const auto rep =
      convergence_sweep(cfg.spec, p, cfg.epsilons, cfg.grid, cfg.margin, !opt.serial);
  const std::filesystem::path out(opt.out);
  std::filesystem::create_directories(out);
  write_report_csv(rep, (out / "report.csv").string());
  write_residuals_csv(rep, (out / "residuals.csv").string());
  write_plot_csv(rep, (out / "plot.csv").string());
  std::cout << summarize(rep);
  return rep.pass ? 0 : 1;
}

} // namespace

int run_cli(int argc, char **argv) {
  CLI::App app{"Asymptotics of a singularly perturbed wave equation on a star graph"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", opt.config, "JSON configuration")->required();
    sub->add_option("--out", opt.out, "output directory");
  };
  auto *check = app.add_subcommand("check", "evaluate the compatibility conditions");
  add_common(check);
  auto *solve = app.add_subcommand("solve", "direct solve for one eps");
  add_common(solve);
  solve->add_option("--eps", opt.eps, "small parameter (default: first configured value)");
  auto *expand = app.add_subcommand("expand", "build the expansion terms");
  add_common(expand);
  expand->add_option("--p", opt.p, "order");
  expand->add_option("--eps", opt.eps, "also write the partial sum for this eps");
  auto *verify = app.add_subcommand("verify", "convergence sweep over the configured eps values");
  add_common(verify);
  verify->add_option("--p", opt.p, "order");
  verify->add_flag("--serial", opt.serial, "run sweep points one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check)
      return cmd_check(opt);
    if (*solve)
      return cmd_solve(opt);
    if (*expand)
      return cmd_expand(opt);
    return cmd_verify(opt);
  } catch (const ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const CompatibilityError &e) {
    std::cerr << e.what() << "\nrun `check` for the full report\n";
    return 1;
  } catch (const CflError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const EvalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace spgraph
