// End-to-end checks of the command-line tool: exit codes, output files and
// byte stability. Runs the built binary through std::system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PARKHAIL_CLI_PATH;
const std::string kScenarios = PARKHAIL_SCENARIO_DIR;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const fs::path out_path = fs::temp_directory_path() / "parkhail_cli_out.txt";
  const std::string cmd = kCli + " " + args + " > " + out_path.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + " = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 3));
}

fs::path workdir() {
  const fs::path d = fs::temp_directory_path() / "parkhail_cli_work";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("").exit_code == 1);
  CHECK(run("solve /nonexistent.json").exit_code == 1);
  CHECK(run("frobnicate " + kScenarios + "/toy_t1.json").exit_code == 1);
}

TEST_CASE("solve prints a full state and matches no-parking at p_g = l") {
  const auto solved = run("solve " + kScenarios + "/toy_t1.json");
  CHECK(solved.exit_code == 0);
  CHECK(parse_field(solved.out, "k_slots") > 0.0);
  CHECK(parse_field(solved.out, "residual_garage") <= 1e-8);

  // rewrite the decision with parking at the cruising cost
  std::string text = slurp(kScenarios + "/toy_t1.json");
  const auto pos = text.find("\"parking_rate\": 2.0");
  REQUIRE(pos != std::string::npos);
  std::string text_l = text;
  text_l.replace(pos, std::string("\"parking_rate\": 2.0").size(), "\"parking_rate\": 8.0");
  const fs::path mod = workdir() / "toy_pg_l.json";
  std::ofstream(mod) << text_l;

  const auto with_l = run("solve " + mod.string());
  const auto no_park = run("solve-no-parking " + mod.string());
  CHECK(with_l.exit_code == 0);
  CHECK(no_park.exit_code == 0);
  CHECK(parse_field(with_l.out, "lambda_per_hour") ==
        doctest::Approx(parse_field(no_park.out, "lambda_per_hour")).epsilon(1e-6));
  CHECK(parse_field(with_l.out, "n_drivers") ==
        doctest::Approx(parse_field(no_park.out, "n_drivers")).epsilon(1e-6));
}

TEST_CASE("infeasible prices exit with code 3") {
  std::string text = slurp(kScenarios + "/toy_t1.json");
  const auto pos = text.find("\"gross_wage\": 20.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"gross_wage\": 20.0").size(), "\"gross_wage\": 0.01");
  const fs::path mod = workdir() / "toy_starved.json";
  std::ofstream(mod) << text;
  const auto r = run("solve-no-parking " + mod.string());
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("error: infeasible:") != std::string::npos);
}

TEST_CASE("sweep emits a byte-stable csv for any worker count") {
  const fs::path dir = workdir();
  const auto r1 = run("sweep " + kScenarios + "/toy_t1.json --threads 1 --out " +
                      (dir / "a_").string());
  const auto r2 = run("sweep " + kScenarios + "/toy_t1.json --threads 2 --out " +
                      (dir / "b_").string());
  const auto r3 = run("sweep " + kScenarios + "/toy_t1.json --threads 2 --out " +
                      (dir / "c_").string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(r3.exit_code == 0);
  const std::string a = slurp(dir / "a_sweep.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b_sweep.csv"));
  CHECK(a == slurp(dir / "c_sweep.csv"));
  CHECK(a.rfind("K,r,parked_ratio,lambda_per_min,", 0) == 0);
}

TEST_CASE("regimes writes the report and the csv") {
  const fs::path dir = workdir();
  const auto r = run("regimes " + kScenarios + "/toy_t1.json --out " + (dir / "reg_").string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "reg_sweep.csv"));
  CHECK(fs::exists(dir / "reg_regimes.txt"));
  const std::string rep = slurp(dir / "reg_regimes.txt");
  CHECK(rep.find("k_star = ") != std::string::npos);
  CHECK(rep.find("all_improvements = yes") != std::string::npos);
}

TEST_CASE("simulate and validate run the shipped sim block") {
  const auto sim = run("simulate " + kScenarios + "/toy_t1.json");
  CHECK(sim.exit_code == 0);
  CHECK(parse_field(sim.out, "r_hat") > 0.5);
  const auto val = run("validate " + kScenarios + "/toy_t1.json");
  CHECK(val.exit_code == 0);
  CHECK(val.out.find("VALIDATION PASS") != std::string::npos);
  // a different seed still passes against the analytics
  const auto val2 = run("validate " + kScenarios + "/toy_t1.json --seed 31337");
  CHECK(val2.exit_code == 0);
}

TEST_CASE("calibrate recovers the demand and supply slopes from anchors") {
  const auto r = run("calibrate " + kScenarios + "/sf_calibrated.json --out \"\"");
  CHECK(r.exit_code == 0);
  const auto epos = r.out.find("\"epsilon\": ");
  REQUIRE(epos != std::string::npos);
  CHECK(std::stod(r.out.substr(epos + 11)) == doctest::Approx(0.124452).epsilon(1e-4));
  const auto mpos = r.out.find("\"mu\": ");
  REQUIRE(mpos != std::string::npos);
  CHECK(std::stod(r.out.substr(mpos + 6)) == doctest::Approx(5.38236).epsilon(1e-4));
}
