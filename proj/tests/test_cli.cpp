#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

// Path of the command-line binary, injected by the build.
#ifndef HYHARDY_CLI_PATH
#error "HYHARDY_CLI_PATH must be defined"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd =
      env_prefix + std::string(HYHARDY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  CliResult res;
  res.out = std::move(out);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

} // namespace

TEST_CASE("kernels: JSON rows carry exact values and nulls out of domain") {
  const auto res = run_cli("kernels --n 3 --p 2 --r 0.5 --r 1 --format json");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("schema_version") == "1");
  CHECK(doc.at("command") == "kernels");
  CHECK(doc.at("n") == 3);
  REQUIRE(doc.at("rows").size() == 2);
  const auto& row0 = doc["rows"][0];
  CHECK(row0.at("r").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(row0.at("f").get<double>() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(row0.at("G").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(row0.at("V_p").get<double>() == doctest::Approx(5.0625).epsilon(1e-15));
  const auto& row1 = doc["rows"][1];
  CHECK(row1.at("f").is_null()); // f diverges at the boundary
  CHECK(row1.at("G").get<double>() == 0.0);
  CHECK(row1.at("V_p").is_null());
}

TEST_CASE("kernels: CSV header and cells, empty cells out of domain") {
  const auto res = run_cli("kernels --n 3 --p 2 --r 0.5 --r 1 --format csv");
  REQUIRE(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "r,f,G,V_p");
  CHECK(lines[1] == "0.5,3,0.5,5.0625");
  CHECK(lines[2] == "1,,0,");
}

TEST_CASE("kernels: --r-grid expands to the requested grid") {
  const auto res = run_cli("kernels --n 4 --r-grid 0.1:0.9:5:uniform --format json");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  REQUIRE(doc.at("rows").size() == 5);
  CHECK(doc["rows"][0].at("r").get<double>() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(doc["rows"][2].at("r").get<double>() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(doc["rows"][4].at("r").get<double>() == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("exit codes: 0 success, 2 validation/parse, 3 refusal") {
  CHECK(run_cli("verify --suite kernels").exit_code == 0);
  CHECK(run_cli("kernels --n 2 --r 0.5").exit_code == 2);        // dimension too small
  CHECK(run_cli("kernels --n 3 --no-such-flag 1").exit_code == 2); // parse error
  CHECK(run_cli("").exit_code == 2);                              // subcommand required
  // coupling beyond the coercivity threshold: refused, not computed
  CHECK(run_cli("mass --n 3 --gamma 0.1875 --s 0 --lambda 9 --ball-radius 0.5")
            .exit_code == 3);
}

TEST_CASE("verify: JSON report with per-check entries") {
  const auto res = run_cli("verify --suite kernels");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("all_passed") == true);
  REQUIRE(doc.at("checks").is_array());
  CHECK(doc["checks"].size() > 0);
  for (const auto& check : doc["checks"]) {
    CHECK(check.at("status") == "pass");
    CHECK(check.contains("name"));
    CHECK(check.contains("measured"));
    CHECK(check.contains("tolerance"));
  }
}

TEST_CASE("mu: repeated runs are byte-identical") {
  const std::string args =
      "mu --n 3 --gamma 0.1 --lambda 0.5 --ball-radius 0.5 --grid-count 201";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc.at("mu_est").get<double>() > 0.0);
  CHECK(doc.at("stationarity").get<double>() < 1e-6);
  CHECK(doc.at("seed") == 9001);
}

TEST_CASE("mass: unperturbed mode reproduces the closed-form oracle") {
  const auto res =
      run_cli("mass --n 3 --gamma 0.1875 --s 0 --unperturbed-radius 1");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  // Delta = 0.5, R = 1: closed form is -R^{-Delta} = -1
  CHECK(doc.at("result").at("mass").get<double>() ==
        doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(doc.at("oracle_closed_form").get<double>() == -1.0);
  CHECK(doc.at("domain").at("kind") == "euclidean_unperturbed");
  // hyperbolic normalization is meaningless without a ball
  CHECK_FALSE(doc["result"].contains("mass_hyperbolic"));
}

TEST_CASE("mass: hyperbolic mode reports both normalizations") {
  const auto res =
      run_cli("mass --n 3 --gamma 0.1875 --s 0 --lambda 2 --ball-radius 0.5");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  const auto& result = doc.at("result");
  CHECK(result.at("mass").get<double>() ==
        doctest::Approx(0.07087050656382779).epsilon(1e-7));
  CHECK(result.at("c1").get<double>() == 1.0);
  // n = 3: the normalization factor is exactly 1
  CHECK(result.at("mass_hyperbolic").get<double>() ==
        doctest::Approx(result.at("mass").get<double>()).epsilon(1e-13));
  CHECK(doc.at("domain").at("kind") == "hyperbolic_ball");
}

TEST_CASE("config file feeds options; explicit flags win") {
  const std::string path = "/tmp/hyhardy_cli_test_config.ini";
  {
    std::ofstream cfg(path);
    cfg << "[kernels]\n"
        << "n=3\n"
        << "p=2.0\n"
        << "r=0.25\n";
  }
  const auto from_cfg = run_cli("kernels --config " + path);
  REQUIRE(from_cfg.exit_code == 0);
  const auto doc1 = nlohmann::json::parse(from_cfg.out);
  REQUIRE(doc1.at("rows").size() == 1);
  CHECK(doc1["rows"][0].at("r").get<double>() == doctest::Approx(0.25).epsilon(1e-15));

  // a flag on the command line overrides the config value
  const auto flag_wins = run_cli("kernels --config " + path + " --r 0.5");
  REQUIRE(flag_wins.exit_code == 0);
  const auto doc2 = nlohmann::json::parse(flag_wins.out);
  REQUIRE(doc2.at("rows").size() == 1);
  CHECK(doc2["rows"][0].at("f").get<double>() == doctest::Approx(3.0).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("--output writes the document to a file instead of stdout") {
  const std::string path = "/tmp/hyhardy_cli_test_output.json";
  std::remove(path.c_str());
  const auto res = run_cli("kernels --n 3 --r 0.5 --output " + path);
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream body;
  body << in.rdbuf();
  const auto doc = nlohmann::json::parse(body.str());
  CHECK(doc.at("rows")[0].at("G").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("certificate: satisfied high-dimension configuration") {
  const auto res =
      run_cli("certificate --n 5 --gamma 1 --s 0 --lambda 2 --ball-radius 0.5");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("regime").at("kind") == "high_dim");
  CHECK(doc.at("satisfied") == true);
  CHECK(doc.at("inconclusive") == false);
  CHECK(doc.at("regime").at("threshold_lambda").get<double>() ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(doc.at("numerical_margin").get<double>() > 0.0);
}
