#include "parkhail/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace parkhail::scenario {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* context, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key))
      throw ParseError(std::string(context) + ": unknown key '" + key + "'");
  }
}

double get_num(const json& obj, const char* context, const char* key) {
  if (!obj.contains(key))
    throw ParseError(std::string(context) + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string(context) + ": '" + key + "' must be a number");
  return v.get<double>();
}

double get_num_or(const json& obj, const char* context, const char* key, double fallback) {
  return obj.contains(key) ? get_num(obj, context, key) : fallback;
}

incentives::MarketParams parse_market(const json& j) {
  check_keys(j, "market",
             {"lambda0", "n0", "k0", "m_coeff", "alpha", "epsilon", "c0", "eta", "w0", "sigma",
              "u0", "l", "mu"});
  incentives::MarketParams p{};
  p.lambda0 = get_num(j, "market", "lambda0");
  p.n0 = get_num(j, "market", "n0");
  p.k0 = get_num(j, "market", "k0");
  p.m_coeff = get_num(j, "market", "m_coeff");
  p.alpha = get_num(j, "market", "alpha");
  p.epsilon = get_num(j, "market", "epsilon");
  p.c0 = get_num(j, "market", "c0");
  p.eta = get_num(j, "market", "eta");
  p.w0 = get_num(j, "market", "w0");
  p.sigma = get_num(j, "market", "sigma");
  p.u0 = get_num(j, "market", "u0");
  p.l = get_num(j, "market", "l");
  p.mu = get_num(j, "market", "mu");
  p.validate();
  return p;
}

incentives::PlatformDecision parse_decision(const json& j) {
  check_keys(j, "decision", {"ride_fare", "gross_wage", "parking_rate"});
  incentives::PlatformDecision d{};
  d.ride_fare = get_num(j, "decision", "ride_fare");
  d.gross_wage = get_num(j, "decision", "gross_wage");
  d.parking_rate = get_num_or(j, "decision", "parking_rate", 0.0);
  d.validate();
  return d;
}

optimizer::AxisSpec parse_axis(const json& j, const char* name, const optimizer::AxisSpec& dflt) {
  if (!j.contains(name)) return dflt;
  const auto& a = j.at(name);
  if (!a.is_array() || a.size() != 3)
    throw ParseError(std::string("grid: '") + name + "' must be [lo, hi, steps]");
  optimizer::AxisSpec out;
  out.lo = a.at(0).get<double>();
  out.hi = a.at(1).get<double>();
  out.steps = a.at(2).get<int>();
  return out;
}

optimizer::GridSpec parse_grid(const json& j, const incentives::MarketParams& market) {
  check_keys(j, "grid",
             {"ride_fare", "gross_wage", "parking_rate", "refinement_rounds", "shrink_factor"});
  optimizer::GridSpec g = optimizer::default_grid(market);
  g.ride_fare = parse_axis(j, "ride_fare", g.ride_fare);
  g.gross_wage = parse_axis(j, "gross_wage", g.gross_wage);
  g.parking_rate = parse_axis(j, "parking_rate", g.parking_rate);
  g.refinement_rounds = static_cast<int>(get_num_or(j, "grid", "refinement_rounds",
                                                    g.refinement_rounds));
  g.shrink_factor = get_num_or(j, "grid", "shrink_factor", g.shrink_factor);
  g.validate();
  return g;
}

std::vector<double> parse_k_grid(const json& j) {
  std::vector<double> ks;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ParseError("k_grid: array entries must be numbers");
      ks.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    check_keys(j, "k_grid", {"min", "max", "count"});
    const double lo = get_num(j, "k_grid", "min");
    const double hi = get_num(j, "k_grid", "max");
    const int count = static_cast<int>(get_num(j, "k_grid", "count"));
    if (count < 2 || !(hi > lo)) throw ParseError("k_grid: need max > min and count >= 2");
    ks.resize(count);
    for (int i = 0; i < count; ++i) ks[i] = lo + (hi - lo) * i / (count - 1);
    ks.back() = hi;
  } else {
    throw ParseError("k_grid must be an array or {min, max, count}");
  }
  if (ks.empty()) throw ParseError("k_grid must not be empty");
  return ks;
}

montecarlo::SimConfig parse_sim(const json& j) {
  check_keys(j, "sim",
             {"arrival_rate", "service_rate", "n_drivers", "k_slots", "horizon_hours",
              "warmup_hours", "seed", "replications", "max_queue"});
  montecarlo::SimConfig s{};
  s.arrival_rate = get_num(j, "sim", "arrival_rate");
  s.service_rate = get_num(j, "sim", "service_rate");
  s.n_drivers = static_cast<int>(get_num(j, "sim", "n_drivers"));
  s.k_slots = static_cast<int>(get_num(j, "sim", "k_slots"));
  s.horizon_hours = get_num(j, "sim", "horizon_hours");
  s.warmup_hours = get_num(j, "sim", "warmup_hours");
  if (!j.contains("seed")) throw ParseError("sim: missing key 'seed'");
  s.seed = j.at("seed").get<std::uint64_t>();
  s.replications = static_cast<int>(get_num(j, "sim", "replications"));
  s.max_queue = static_cast<std::int64_t>(get_num_or(j, "sim", "max_queue", 1e6));
  s.validate();
  return s;
}

optimizer::CalibrationAnchors parse_anchors(const json& j) {
  check_keys(j, "anchors", {"lambda", "n_drivers", "travel_cost", "net_wage", "waiting_time_min"});
  optimizer::CalibrationAnchors a{};
  a.lambda_obs = get_num(j, "anchors", "lambda");
  a.n_obs = get_num(j, "anchors", "n_drivers");
  a.c_obs = get_num(j, "anchors", "travel_cost");
  a.wn_obs = get_num(j, "anchors", "net_wage");
  a.tw_obs = get_num(j, "anchors", "waiting_time_min");
  return a;
}

}  // namespace

optimizer::GridSpec Scenario::grid_or_default() const {
  return grid ? *grid : optimizer::default_grid(market);
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("scenario is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ParseError("scenario root must be an object");
  check_keys(j, "scenario",
             {"market", "decision", "grid", "k_grid", "sim", "anchors", "output_prefix"});
  if (!j.contains("market")) throw ParseError("scenario: missing 'market' block");

  Scenario sc;
  sc.market = parse_market(j.at("market"));
  if (j.contains("decision")) sc.decision = parse_decision(j.at("decision"));
  if (j.contains("grid")) sc.grid = parse_grid(j.at("grid"), sc.market);
  if (j.contains("k_grid")) sc.k_grid = parse_k_grid(j.at("k_grid"));
  if (j.contains("sim")) sc.sim = parse_sim(j.at("sim"));
  if (j.contains("anchors")) sc.anchors = parse_anchors(j.at("anchors"));
  if (j.contains("output_prefix")) {
    if (!j.at("output_prefix").is_string())
      throw ParseError("scenario: 'output_prefix' must be a string");
    sc.output_prefix = j.at("output_prefix").get<std::string>();
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& os, const optimizer::SweepTable& table) {
  os << "K,r,parked_ratio,lambda_per_min,N,N_onroad,t_w_min,c,w_g,w_n,p_f,p_d,p_g,"
        "profit_per_hour,residual_max\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : table.rows) {
    const auto& st = row.state;
    const double lambda_min = row.ok ? st.lambda / 60.0 : nan;
    const double p_d = row.ok ? st.decision.gross_wage * st.n_drivers / st.lambda : nan;
    const double fields[] = {row.k_slots,
                             row.ok ? st.utilization : nan,
                             row.ok ? st.parked_ratio : nan,
                             lambda_min,
                             row.ok ? st.n_drivers : nan,
                             row.ok ? st.n_onroad : nan,
                             row.ok ? st.t_w : nan,
                             row.ok ? st.travel_cost : nan,
                             row.ok ? st.decision.gross_wage : nan,
                             row.ok ? st.net_wage : nan,
                             row.ok ? st.decision.ride_fare : nan,
                             p_d,
                             row.ok ? st.decision.parking_rate : nan,
                             row.ok ? st.profit_per_hour : nan,
                             row.ok ? st.residual_max() : nan};
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      if (i) os << ',';
      os << format_double(fields[i]);
    }
    os << '\n';
  }
}

void write_state(std::ostream& os, const equilibrium::EquilibriumState& st) {
  const auto put = [&](const char* k, double v) { os << k << " = " << format_double(v) << '\n'; };
  put("p_f", st.decision.ride_fare);
  put("w_g", st.decision.gross_wage);
  put("p_g", st.decision.parking_rate);
  put("lambda_per_hour", st.lambda);
  put("lambda_per_min", st.lambda / 60.0);
  put("n_drivers", st.n_drivers);
  put("k_slots", st.k_slots);
  put("r", st.utilization);
  put("t_w_min", st.t_w);
  put("travel_cost", st.travel_cost);
  put("net_wage", st.net_wage);
  put("n_parked", st.n_parked);
  put("n_onroad", st.n_onroad);
  put("parked_ratio", st.parked_ratio);
  put("profit_per_hour", st.profit_per_hour);
  put("residual_arrivals", st.residuals[0]);
  put("residual_drivers", st.residuals[1]);
  put("residual_garage", st.residuals[2]);
  if (st.multiple_equilibria)
    os << "warning = garage fixed point depends on the iteration start\n";
}

void write_regime_report(std::ostream& os, const optimizer::RegimeReport& rep) {
  const auto put = [&](const char* k, double v) { os << k << " = " << format_double(v) << '\n'; };
  put("k1", rep.k1);
  put("k2", rep.k2);
  put("k_star", rep.k_star);
  put("plateau_tol", rep.plateau_tol);
  os << "regime1 = [" << format_double(rep.regime1.k_lo) << ", " << format_double(rep.regime1.k_hi)
     << "] rows=" << rep.regime1.rows << '\n';
  os << "regime2 = [" << format_double(rep.regime2.k_lo) << ", " << format_double(rep.regime2.k_hi)
     << "] rows=" << rep.regime2.rows << '\n';
  os << "regime3 = [" << format_double(rep.regime3.k_lo) << ", " << format_double(rep.regime3.k_hi)
     << "] rows=" << rep.regime3.rows << '\n';
  const auto endpoint = [&](const char* name, const optimizer::RegimeReport::Endpoint& e) {
    os << name << ": K=" << format_double(e.k_slots) << " lambda_per_min="
       << format_double(e.lambda / 60.0) << " N=" << format_double(e.n_drivers)
       << " N_onroad=" << format_double(e.n_onroad) << " c=" << format_double(e.travel_cost)
       << " w_n=" << format_double(e.net_wage) << " profit=" << format_double(e.profit) << '\n';
  };
  endpoint("baseline", rep.baseline);
  endpoint("optimum", rep.optimum);
  const auto& im = rep.improvements;
  const auto flag = [](bool b) { return b ? "yes" : "NO"; };
  os << "arrivals_up = " << flag(im.arrivals_up) << '\n';
  os << "cost_down = " << flag(im.cost_down) << '\n';
  os << "drivers_up = " << flag(im.drivers_up) << '\n';
  os << "net_wage_up = " << flag(im.net_wage_up) << '\n';
  os << "profit_up = " << flag(im.profit_up) << '\n';
  os << "all_improvements = " << flag(im.all()) << '\n';
}

void write_sim_result(std::ostream& os, const montecarlo::SimResult& res) {
  os << "r_hat = " << format_double(res.r_hat) << '\n';
  os << "r_stderr = " << format_double(res.r_stderr) << '\n';
  os << "mean_queue_delay_hours = " << format_double(res.mean_queue_delay_hours) << '\n';
  os << "mean_busy = " << format_double(res.mean_busy) << '\n';
  os << "idle_histogram:\n";
  for (int i = 0; i < res.idle_histogram.size(); ++i) {
    os << "  " << i << " " << format_double(res.idle_histogram[i]) << " "
       << format_double(res.idle_histogram_stderr[i]) << '\n';
  }
}

void write_validation_report(std::ostream& os, const montecarlo::ValidationReport& rep) {
  for (const auto& c : rep.checks) {
    os << (c.pass ? "pass" : "FAIL") << ' ' << c.name << " sim=" << format_double(c.simulated)
       << " expected=" << format_double(c.expected) << " stderr=" << format_double(c.stderr_)
       << " sigmas=" << format_double(c.sigmas) << '\n';
  }
  os << (rep.pass ? "VALIDATION PASS" : "VALIDATION FAIL") << '\n';
}

void write_market_params(std::ostream& os, const incentives::MarketParams& p) {
  const auto put = [&](const char* k, double v) {
    os << "  \"" << k << "\": " << format_double(v);
  };
  os << "{\n  \"market\": {\n";
  const std::pair<const char*, double> fields[] = {
      {"lambda0", p.lambda0}, {"n0", p.n0},           {"k0", p.k0},   {"m_coeff", p.m_coeff},
      {"alpha", p.alpha},     {"epsilon", p.epsilon}, {"c0", p.c0},   {"eta", p.eta},
      {"w0", p.w0},           {"sigma", p.sigma},     {"u0", p.u0},   {"l", p.l},
      {"mu", p.mu}};
  bool first = true;
  for (const auto& [k, v] : fields) {
    if (!first) os << ",\n";
    os << "  ";
    put(k, v);
    first = false;
  }
  os << "\n  }\n}\n";
}

}  // namespace parkhail::scenario
