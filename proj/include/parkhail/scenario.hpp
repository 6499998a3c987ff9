#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parkhail/equilibrium.hpp"
#include "parkhail/montecarlo.hpp"
#include "parkhail/optimizer.hpp"

// Scenario files (JSON) and the plain-text / CSV emitters used by the CLI.
// Parsing is strict: unknown keys anywhere are ParseErrors, and every block
// is validated with the same invariants as the underlying type.
namespace parkhail::scenario {

struct Scenario {
  incentives::MarketParams market;
  std::optional<incentives::PlatformDecision> decision;
  std::optional<optimizer::GridSpec> grid;
  std::optional<std::vector<double>> k_grid;
  std::optional<montecarlo::SimConfig> sim;
  std::optional<optimizer::CalibrationAnchors> anchors;
  std::string output_prefix;

  optimizer::GridSpec grid_or_default() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

// Shortest round-trip decimal form (std::to_chars); locale-independent.
std::string format_double(double v);

// Sweep CSV, one row per K in table order. Columns:
//   K,r,parked_ratio,lambda_per_min,N,N_onroad,t_w_min,c,w_g,w_n,p_f,p_d,
//   p_g,profit_per_hour,residual_max
// p_d is the per-trip driver payment w_g*N/lambda. Failed rows emit nan
// observables. Bytes depend only on the table contents.
void write_sweep_csv(std::ostream& os, const optimizer::SweepTable& table);

void write_state(std::ostream& os, const equilibrium::EquilibriumState& state);
void write_regime_report(std::ostream& os, const optimizer::RegimeReport& report);
void write_sim_result(std::ostream& os, const montecarlo::SimResult& result);
void write_validation_report(std::ostream& os, const montecarlo::ValidationReport& report);
void write_market_params(std::ostream& os, const incentives::MarketParams& params);

}  // namespace parkhail::scenario
