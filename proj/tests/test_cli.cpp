#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pwcop/model_io.hpp"
#include "pwcop/pwcop.hpp"
#include "test_support.hpp"

using Catch::Approx;
using namespace pwcop;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("pwcop_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args, const std::string& stdout_file = "out.txt") {
  const std::string cmd =
      std::string(PWCOP_CLI_PATH) + " " + args + " > " + path(stdout_file) + " 2> " + path("err.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& file) {
  std::ifstream in(path(file));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate writes tent data with an x,y header", "[cli]") {
  REQUIRE(run("simulate example1 --theta 0.6 --n 100 --seed 7 --out " + path("e1.csv")) == 0);
  const std::string text = slurp("e1.csv");
  CHECK(text.rfind("x,y\n", 0) == 0);
  const auto s = io::read_csv_sample(path("e1.csv"));
  CHECK(s.size() == 100);
  for (const auto& o : s.observations()) CHECK(o.y == tent(o.x, 0.6));

  REQUIRE(run("simulate example1 --theta 0.6 --n 100 --seed 7 --out " + path("e1b.csv")) == 0);
  CHECK(slurp("e1b.csv") == text);
}

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(run("simulate example4 --k 0.1 --n 0") == 1);
  CHECK(run("simulate example9 --n 10") == 1);
  CHECK(run("simulate example1 --theta 1.5 --n 10") == 1);
  CHECK(run("measures --family nope") == 1);
  CHECK(run("measures --family clayton") == 1);
  CHECK(run("") == 1);
}

TEST_CASE("data errors exit with 2", "[cli]") {
  {
    std::ofstream out(path("bad.csv"));
    out << "x,y\n1,2\n3,oops\n4,5\n";
  }
  CHECK(run("analyze " + path("bad.csv")) == 2);
  CHECK(slurp("err.txt").find("3") != std::string::npos);
  CHECK(run("analyze " + path("missing.csv")) == 2);
  {
    std::ofstream out(path("bad.json"));
    out << "{\"format\":\"pwcop-model\"}";
  }
  CHECK(run("predict " + path("bad.json")) == 2);
}

TEST_CASE("analyze, fit and predict on tent data", "[cli]") {
  REQUIRE(run("simulate example1 --theta 0.6 --n 5000 --seed 7 --out " + path("big.csv")) == 0);
  REQUIRE(run("analyze " + path("big.csv"), "analysis.json") == 0);
  const auto report = io::parse_json_text(slurp("analysis.json"));
  CHECK(report["n"] == 5000);
  CHECK(report["schema_version"] == 1);
  CHECK(report["mixed_dependence"] == true);
  REQUIRE(report["candidates"].size() == 1);
  CHECK(report["candidates"][0].get<double>() == Approx(0.6).margin(0.05));
  CHECK(report["warnings"].empty());

  REQUIRE(run("fit " + path("big.csv") + " --breakpoints 0.6 --families W,M,product --out " + path("m.json"),
              "table.txt") == 0);
  const std::string table = slurp("table.txt");
  CHECK(table.find("frechet-upper") != std::string::npos);
  CHECK(table.find("frechet-lower") != std::string::npos);

  REQUIRE(run("predict " + path("m.json") + " --x 0.3,0.9,7", "pred.csv") == 0);
  const auto pred = slurp("pred.csv");
  CHECK(pred.rfind("x,mu\n", 0) == 0);
  CHECK(pred.find("7,nan") != std::string::npos);
  CHECK(slurp("err.txt").find("warning") != std::string::npos);
  CHECK(run("predict " + path("m.json") + " --x 7 --strict") == 2);
  CHECK(run("fit " + path("big.csv") + " --families nonsense --out " + path("x.json")) == 1);
}

TEST_CASE("small samples carry a warning", "[cli]") {
  REQUIRE(run("simulate example4 --k 0.1 --n 30 --seed 1 --out " + path("small.csv")) == 0);
  REQUIRE(run("analyze " + path("small.csv"), "small.json") == 0);
  CHECK(io::parse_json_text(slurp("small.json"))["warnings"].size() == 1);
}

TEST_CASE("predict on an independence model", "[cli]") {
  const PiecewiseRegressionModel pm({}, {product_copula()}, uniform_marginal(), uniform_marginal());
  {
    std::ofstream out(path("pi.json"));
    out << io::serialize(io::to_json(pm));
  }
  REQUIRE(run("predict " + path("pi.json") + " --from 0 --to 1 --steps 5", "pi.csv") == 0);
  std::istringstream lines(slurp("pi.csv"));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::stod(line.substr(line.find(',') + 1)) == Approx(0.5).margin(1e-9));
  }
  CHECK(rows == 5);
}

TEST_CASE("measures", "[cli]") {
  REQUIRE(run("measures --family example1 --theta 0.25", "m1.json") == 0);
  const auto m1 = io::parse_json_text(slurp("m1.json"));
  CHECK(m1["rho"].get<double>() == Approx(-0.5).margin(1e-3));
  CHECK(m1["sigma"].get<double>() == Approx(0.625).margin(1e-3));

  REQUIRE(run("measures --family product", "m2.json") == 0);
  const auto m2 = io::parse_json_text(slurp("m2.json"));
  CHECK(m2["rho"].get<double>() == Approx(0.0).margin(1e-12));
  CHECK(m2["sigma"].get<double>() == Approx(0.0).margin(1e-12));
  CHECK(m2["quadrant_class"] == "INDEPENDENT-LIKE");

  REQUIRE(run("measures --family frechet-upper", "m3.json") == 0);
  const auto m3 = io::parse_json_text(slurp("m3.json"));
  CHECK(m3["quadrant_class"] == "PQD");
  CHECK(m3["regression_class"] == "PRD");

  REQUIRE(run("measures --data " + path("e1.csv"), "m4.json") == 0);
  CHECK(io::parse_json_text(slurp("m4.json"))["n"] == 100);
}
