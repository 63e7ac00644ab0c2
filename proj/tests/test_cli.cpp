#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "slepf/exact_pf.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "slepf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = slepf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& text) {
  auto line = text.substr(0, text.find('\n'));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("slepf_test_" + name)).string();
}

}  // namespace

TEST_CASE("params as JSON and CSV") {
  const auto r = run({"params", "--kappa", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("h").get<double>() == 0.5);
  CHECK(j.at("c").get<double>() == 0.5);
  CHECK(j.at("h13").get<double>() == doctest::Approx(5.0 / 3.0).epsilon(1e-13));
  CHECK(r.out.find("1.66666666666667") != std::string::npos);
  const auto c = run({"params", "--kappa", "3", "--format", "csv"});
  REQUIRE(c.code == 0);
  CHECK(first_line(c.out) == "kappa,h,c,h13");
}

TEST_CASE("pf eval matches the library") {
  const auto r = run({"pf", "eval", "--kappa", "3", "--alpha", "1-4,2-3", "--points", "0,1,2,4", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const std::vector<double> x = {0.0, 1.0, 2.0, 4.0};
  CHECK(j.at("value").get<double>() ==
        doctest::Approx(slepf::z_four(3.0, slepf::LinkPattern::parse("1-4,2-3"), x)).epsilon(1e-13));
  CHECK(j.at("method") == "exact");
  CHECK(j.contains("abs_error"));
}

TEST_CASE("verification suites report pass") {
  const auto r = run({"pf", "verify", "--suite", "cov", "--kappa", "3", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("passed") == true);
  CHECK(run({"fusion", "check", "--kappa", "3"}).code == 0);
  CHECK(run({"coulomb", "check", "--kappa", "5"}).code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"params"}).code == 2);
  CHECK(run({"params", "--kappa", "-1"}).code == 2);
  CHECK(run({"params", "--kappa", "3", "--format", "xml"}).code == 2);
  CHECK(run({"pf", "eval", "--kappa", "3", "--alpha", "1-3,2-4", "--points", "0,1,2,3"}).code == 2);
  CHECK(run({"pf", "eval", "--kappa", "3", "--alpha", "1-2,3-4", "--points", "0,2,1,3"}).code == 2);
  // stopping rule that cannot be met
  const auto t = run({"mc", "estimate", "--kappa", "3", "--alpha", "1-2,3-4", "--points", "0,1,2,4", "--samples", "1",
                      "--stop-eps", "1e-300"});
  CHECK(t.code == 1);
  CHECK(t.err.find("stopping rule") != std::string::npos);
}

TEST_CASE("seed falls back to SLEPF_SEED") {
  const auto a = run({"sle", "sample", "--kappa", "3", "--steps", "20", "--seed", "4", "--format", "csv"});
  ::setenv("SLEPF_SEED", "4", 1);
  const auto b = run({"sle", "sample", "--kappa", "3", "--steps", "20", "--format", "csv"});
  ::setenv("SLEPF_SEED", "5", 1);
  const auto c = run({"sle", "sample", "--kappa", "3", "--steps", "20", "--format", "csv"});
  ::setenv("SLEPF_SEED", "x", 1);
  const auto d = run({"sle", "sample", "--kappa", "3", "--steps", "20"});
  ::unsetenv("SLEPF_SEED");
  REQUIRE(a.code == 0);
  CHECK(first_line(a.out) == "t,w");
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(d.code == 2);
}

TEST_CASE("tabular output and output file") {
  const auto r = run({"ising", "crossing", "--width", "8", "--height", "8", "--samples", "40", "--burn-in", "10"});
  REQUIRE(r.code == 0);
  CHECK(first_line(r.out) == "alpha,empirical,stderr,predicted");
  const auto path = temp_path("params.json");
  REQUIRE(run({"params", "--kappa", "6", "--format", "json", "-o", path}).code == 0);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("h").get<double>() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("JSON and TOML configuration files") {
  const auto json_path = temp_path("cfg.json");
  std::ofstream(json_path) << R"({"pf": {"eval": {"kappa": 4, "alpha": "1-2", "points": "0,4"}}})";
  const auto a = run({"--config", json_path, "--format", "json", "pf", "eval"});
  REQUIRE(a.code == 0);
  CHECK(nlohmann::json::parse(a.out).at("value").get<double>() == doctest::Approx(0.5));
  const auto toml_path = temp_path("cfg.toml");
  std::ofstream(toml_path) << "[pf.eval]\nkappa = 4\nalpha = \"1-2\"\npoints = \"0,4\"\n";
  const auto b = run({"--config", toml_path, "--format", "json", "pf", "eval"});
  REQUIRE(b.code == 0);
  CHECK(nlohmann::json::parse(b.out).at("value").get<double>() == doctest::Approx(0.5));
  const auto bad_path = temp_path("bad.json");
  std::ofstream(bad_path) << "{ not json";
  CHECK(run({"--config", bad_path, "pf", "eval"}).code == 2);
  for (const auto& p : {json_path, toml_path, bad_path}) std::filesystem::remove(p);
}
