// parkhail: market equilibrium, pricing optimization and queue simulation
// for a ride-hailing platform renting idle parking space.
//
// Exit codes: 0 success, 1 usage/scenario error, 2 solver non-convergence,
// 3 infeasible market, 4 failed simulation validation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "parkhail/scenario.hpp"

namespace {

using namespace parkhail;

struct CommonOpts {
  std::string scenario_path;
  double tol = 1e-8;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out_prefix;  // overrides the scenario's output_prefix
};

std::string prefix(const scenario::Scenario& sc, const CommonOpts& opts) {
  return opts.out_prefix.empty() ? sc.output_prefix : opts.out_prefix;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // binary: byte-stable newlines
  if (!os) throw ParseError("cannot open output file: " + path);
  return os;
}

const incentives::PlatformDecision& require_decision(const scenario::Scenario& sc) {
  if (!sc.decision) throw ParseError("scenario needs a 'decision' block for this subcommand");
  return *sc.decision;
}

int run_solve(const scenario::Scenario& sc, const CommonOpts& opts, bool no_parking) {
  const auto& dec = require_decision(sc);
  const auto state =
      no_parking
          ? equilibrium::solve_no_parking(dec.ride_fare, dec.gross_wage, sc.market, opts.tol)
          : equilibrium::solve(dec, sc.market, opts.tol);
  scenario::write_state(std::cout, state);
  return 0;
}

int run_optimize(const scenario::Scenario& sc, const CommonOpts& opts, bool no_parking) {
  const auto grid = sc.grid_or_default();
  const auto result =
      no_parking ? optimizer::maximize_profit_no_parking(sc.market, grid, opts.tol, opts.threads)
                 : optimizer::maximize_profit(sc.market, grid, opts.tol, opts.threads);
  scenario::write_state(std::cout, result.state);
  return 0;
}

optimizer::SweepTable run_sweep_table(const scenario::Scenario& sc, const CommonOpts& opts) {
  if (!sc.k_grid) throw ParseError("scenario needs a 'k_grid' block for this subcommand");
  return optimizer::sweep_k(sc.market, *sc.k_grid, sc.grid_or_default(), opts.tol, opts.threads);
}

int run_sweep(const scenario::Scenario& sc, const CommonOpts& opts) {
  const auto table = run_sweep_table(sc, opts);
  const std::string path = prefix(sc, opts) + "sweep.csv";
  auto os = open_output(path);
  scenario::write_sweep_csv(os, table);
  std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
  return 0;
}

int run_regimes(const scenario::Scenario& sc, const CommonOpts& opts, double plateau_tol) {
  const auto table = run_sweep_table(sc, opts);
  const auto report = optimizer::detect_regimes(table, plateau_tol);
  const std::string csv_path = prefix(sc, opts) + "sweep.csv";
  auto csv = open_output(csv_path);
  scenario::write_sweep_csv(csv, table);
  const std::string rep_path = prefix(sc, opts) + "regimes.txt";
  auto rep = open_output(rep_path);
  scenario::write_regime_report(rep, report);
  scenario::write_regime_report(std::cout, report);
  std::cout << "wrote " << csv_path << " and " << rep_path << "\n";
  return 0;
}

montecarlo::SimConfig sim_config(const scenario::Scenario& sc, const CommonOpts& opts) {
  if (!sc.sim) throw ParseError("scenario needs a 'sim' block for this subcommand");
  montecarlo::SimConfig cfg = *sc.sim;
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

int run_simulate(const scenario::Scenario& sc, const CommonOpts& opts) {
  const auto result = montecarlo::simulate(sim_config(sc, opts));
  scenario::write_sim_result(std::cout, result);
  return 0;
}

int run_validate(const scenario::Scenario& sc, const CommonOpts& opts, double tol_sigmas) {
  const auto report = montecarlo::validate_against_analytic(sim_config(sc, opts), tol_sigmas);
  scenario::write_validation_report(std::cout, report);
  return report.pass ? 0 : 4;
}

int run_calibrate(const scenario::Scenario& sc, const CommonOpts& opts) {
  if (!sc.anchors) throw ParseError("scenario needs an 'anchors' block for this subcommand");
  const auto calibrated = optimizer::calibrate(sc.market, *sc.anchors);
  scenario::write_market_params(std::cout, calibrated);
  const std::string pfx = prefix(sc, opts);
  if (!pfx.empty()) {
    const std::string path = pfx + "calibrated.json";
    auto os = open_output(path);
    scenario::write_market_params(os, calibrated);
    std::cerr << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ride-hailing parking market: equilibrium, pricing, simulation"};
  app.require_subcommand(1);

  CommonOpts opts;
  double plateau_tol = 1e-3;
  double tol_sigmas = 3.0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", opts.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--tol", opts.tol, "solver tolerance on relative residuals");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    cmd->add_option("--out", opts.out_prefix, "output path prefix override");
    return cmd;
  };

  auto* c_solve = add_common(app.add_subcommand("solve", "full equilibrium at given prices"));
  auto* c_solve_np = add_common(
      app.add_subcommand("solve-no-parking", "equilibrium at given prices without parking"));
  auto* c_opt = add_common(app.add_subcommand("optimize", "maximize profit over prices"));
  bool opt_no_parking = false;
  c_opt->add_flag("--no-parking", opt_no_parking, "optimize (p_f, w_g) without parking");
  auto* c_sweep = add_common(app.add_subcommand("sweep", "per-K optimization sweep to CSV"));
  auto* c_regimes =
      add_common(app.add_subcommand("regimes", "sweep plus three-regime detection"));
  c_regimes->add_option("--plateau-tol", plateau_tol, "relative plateau tolerance");
  auto* c_sim = add_common(app.add_subcommand("simulate", "discrete-event queue simulation"));
  c_sim->add_option("--seed", opts.seed, "override the scenario seed");
  auto* c_val =
      add_common(app.add_subcommand("validate", "simulate and compare against analytics"));
  c_val->add_option("--seed", opts.seed, "override the scenario seed");
  c_val->add_option("--sigmas", tol_sigmas, "tolerance in standard errors");
  auto* c_cal = add_common(app.add_subcommand("calibrate", "back out (epsilon, eta, mu)"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    const auto sc = scenario::load_scenario(opts.scenario_path);
    if (c_solve->parsed()) return run_solve(sc, opts, false);
    if (c_solve_np->parsed()) return run_solve(sc, opts, true);
    if (c_opt->parsed()) return run_optimize(sc, opts, opt_no_parking);
    if (c_sweep->parsed()) return run_sweep(sc, opts);
    if (c_regimes->parsed()) return run_regimes(sc, opts, plateau_tol);
    if (c_sim->parsed()) return run_simulate(sc, opts);
    if (c_val->parsed()) return run_validate(sc, opts, tol_sigmas);
    if (c_cal->parsed()) return run_calibrate(sc, opts);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: non-convergence: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return 3;
  } catch (const InstabilityError& e) {
    std::cerr << "error: unstable: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
