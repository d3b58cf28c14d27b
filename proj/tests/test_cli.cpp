#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "doctest.h"
#include "kincouple/cli.hpp"

using kincouple::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("morse-spectrum JSON envelope") {
  const auto r = call({"morse-spectrum", "--m1", "1", "--m2", "1", "--kappa", "0", "--lambda", "25", "--beta", "1",
                       "--alpha", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "morse-spectrum");
  CHECK(j["units"] == "natural, hbar=1");
  CHECK(j["config"]["lambda"] == 25.0);
  CHECK(j["config"]["kappa"] == 0.0);
  CHECK(j["results"]["n_bound"] == 5);
  REQUIRE(j["results"]["levels"].size() == 5);
  CHECK(j["results"]["levels"][0]["E_rel"].get<double>() == doctest::Approx(4.75));
  CHECK(j["results"]["levels"][4]["n"] == 4);
}

TEST_CASE("morse-spectrum CSV") {
  const auto r = call({"morse-spectrum", "--format", "csv", "--hbar", "1"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 6);
  CHECK(l[0] == "n,E_rel,E_total");
  CHECK(l[1] == "0,4.75,4.75");
  CHECK(l[5] == "4,24.75,24.75");
}

TEST_CASE("invalid coupling is a usage error naming the invariant") {
  const auto r = call({"morse-spectrum", "--kappa", "1.5", "--m1", "1", "--m2", "1"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("kappa^2 < 1/(m1*m2)") != std::string::npos);
  CHECK(lines(r.err).size() == 1);
}

TEST_CASE("usage errors") {
  CHECK(call({}).code == 2);
  CHECK(call({"morse-spectrum", "--no-such-flag", "1"}).code == 2);
  CHECK(call({"no-such-command"}).code == 2);
  CHECK(call({"morse-spectrum", "--lambda", "abc"}).code == 2);
  CHECK(call({"morse-spectrum", "--format", "xml"}).code == 2);
  CHECK(call({"morse-wavefunction", "--n", "7"}).code == 2);
  CHECK(call({"morse-green", "--energy", "30"}).code == 2);
  CHECK(call({"pendulum-kernel", "--regime", "sideways"}).code == 2);
  CHECK(call({"verify", "--system", "galaxy"}).code == 2);
  CHECK(call({"morse-spectrum", "--output", "/nonexistent-dir/x.json"}).code == 2);
}

TEST_CASE("numerical failures exit 1 with the module error") {
  // omega_2 T = pi for the default 3:1 pendulum is reached at T = pi / sqrt(2)
  const auto r = call({"pendulum-kernel", "--m1", "3", "--m2", "1", "--regime", "real", "--T", "2.2214414690791831"});
  CHECK(r.code == 1);
  CHECK(r.err.find("caustic") != std::string::npos);
  const auto o = call({"pendulum-kernel", "--m1", "3", "--m2", "1", "--regime", "imaginary", "--T", "1000"});
  CHECK(o.code == 1);
  CHECK(o.err.find("overflow") != std::string::npos);
}

TEST_CASE("help lists flags with units") {
  const auto r = call({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--kappa") != std::string::npos);
  CHECK(r.out.find("[1/mass]") != std::string::npos);
  CHECK(r.out.find("CSV columns") != std::string::npos);
}

TEST_CASE("config file precedence") {
  const auto cfg = temp_file("kincouple_test.cfg", "lambda=16\nkappa=0.1\n");
  auto r = call({"morse-spectrum", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["config"]["lambda"] == 16.0);
  CHECK(j["config"]["kappa"] == 0.1);
  r = call({"morse-spectrum", "--config", cfg.string(), "--lambda", "25"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["config"]["lambda"] == 25.0);
  CHECK(j["config"]["kappa"] == 0.1);

  const auto bad = temp_file("kincouple_bad.cfg", "lambda=16\nwobble=3\n");
  CHECK(call({"morse-spectrum", "--config", bad.string()}).code == 2);
  CHECK(call({"morse-spectrum", "--config", "/nonexistent/kincouple.cfg"}).code == 2);
  std::filesystem::remove(cfg);
  std::filesystem::remove(bad);
}

TEST_CASE("output to a file") {
  const auto path = std::filesystem::temp_directory_path() / "kincouple_out.csv";
  const auto r = call({"pendulum-spectrum", "--format", "csv", "--levels", "4", "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto l = lines(ss.str());
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "n1,n2,E");
  std::filesystem::remove(path);
}

TEST_CASE("output is byte stable") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"morse-green", "--kappa", "0.2"}, {"morse-wavefunction", "--n", "3", "--format", "csv"},
        {"pendulum-kernel", "--phi1", "0.1,0.2", "--phi2", "-0.1,0.3"}}) {
    const auto a = call(args), b = call(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("morse-wavefunction") {
  auto r = call({"morse-wavefunction", "--n", "1", "--points", "11", "--x-min", "-0.5", "--x-max", "2", "--format", "csv"});
  REQUIRE(r.code == 0);
  auto l = lines(r.out);
  REQUIRE(l.size() == 12);
  CHECK(l[0] == "x,psi,V(x)");
  CHECK(l[1].rfind("-0.5,", 0) == 0);
  r = call({"morse-wavefunction", "--k", "0.7", "--points", "5"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["command"] == "morse-wavefunction");
  CHECK(j["config"]["points"] == 5);
}

TEST_CASE("morse-green") {
  auto r = call({"morse-green", "--energy", "4.75", "--format", "csv"});
  REQUIRE(r.code == 0);
  auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "E,G,inverse_G");
  r = call({"morse-green", "--scan-points", "50"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["config"]["x1"].is_number());
}

TEST_CASE("pendulum subcommands") {
  auto r = call({"pendulum-modes", "--m1", "3", "--m2", "1", "--l", "1", "--g", "1"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["results"]["omega2"][0].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(j["results"]["omega2"][1].get<double>() == doctest::Approx(2.0).epsilon(1e-14));

  r = call({"pendulum-modes", "--m1", "3", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[0] == "k,omega2,omega,C_k1,C_k2");

  r = call({"pendulum-kernel", "--m1", "3", "--phi1", "0,0", "--phi2", "0,0", "--T", "1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[0] == "re,im,abs");

  r = call({"pendulum-spectrum", "--m1", "3", "--levels", "6"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  const auto& lv = j["results"]["levels"];
  REQUIRE(lv.size() == 6);
  for (size_t i = 1; i < lv.size(); ++i) CHECK(lv[i]["E"].get<double>() >= lv[i - 1]["E"].get<double>());
}

TEST_CASE("verify") {
  auto r = call({"verify", "--system", "morse", "--kappa", "0.2", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["results"]["all_pass"] == true);
  CHECK(j["results"]["checks"].size() == 3);
  r = call({"verify", "--system", "pendulum"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
