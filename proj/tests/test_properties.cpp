#include <cmath>
#include <string>
#include <vector>

#include "pwcop/pwcop.hpp"
#include "test_support.hpp"

using Catch::Approx;
using namespace pwcop;

namespace {

struct Named {
  std::string name;
  Copula copula;
};

std::vector<Named> closed_form_sweep() {
  std::vector<Named> out = {{"product", product_copula()}, {"M", frechet_upper()}, {"W", frechet_lower()}};
  for (double t : {0.05, 0.5, 1.0, 3.0, 10.0, 40.0}) out.push_back({"clayton " + std::to_string(t), clayton(t)});
  for (double t : {-30.0, -5.0, -0.5, 0.5, 5.0, 30.0}) out.push_back({"frank " + std::to_string(t), frank(t)});
  for (double t : {1.0, 1.2, 2.0, 5.0, 20.0}) out.push_back({"gumbel " + std::to_string(t), gumbel(t)});
  for (double t : {-1.0, -0.4, 0.3, 1.0}) out.push_back({"fgm " + std::to_string(t), fgm(t)});
  for (double t : {0.01, 0.3, 2.0, 50.0}) out.push_back({"plackett " + std::to_string(t), plackett(t)});
  for (double t : {0.1, 0.5, 0.9}) out.push_back({"tent " + std::to_string(t), tent_copula(t)});
  out.push_back({"glued", glue({clayton(2.0), frank(-3.0), fgm(0.5)}, {0.3, 0.6})});
  return out;
}

}  // namespace

TEST_CASE("copula axioms over parameter sweeps", "[properties]") {
  for (const auto& [name, c] : closed_form_sweep()) {
    INFO(name);
    const auto report = check_copula_axioms(c, 101);
    CHECK(report.worst() <= 1e-9);
  }
  const auto model = make_example4_model(0.1);
  const auto [c1, c2] = example4_pieces(model);
  for (const auto& c : {example4_copula(model), c1, c2}) CHECK(check_copula_axioms(c, 101).worst() <= 1e-6);
}

TEST_CASE("du is monotone in v and bounded", "[properties]") {
  for (const auto& [name, c] : closed_form_sweep()) {
    INFO(name);
    for (double u : testing::grid01(21)) {
      double previous = -1.0;
      for (double v : testing::grid01(41)) {
        const double d = du(c, {u, v});
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(previous <= d + 1e-9);
        previous = d;
      }
    }
  }
}

TEST_CASE("rho is bounded by sigma", "[properties]") {
  for (const auto& [name, c] : closed_form_sweep()) {
    INFO(name);
    CHECK(std::abs(spearman_rho(c)) <= schweizer_wolff_sigma(c) + 2e-3);
  }
}

TEST_CASE("regression dependence implies quadrant dependence", "[properties]") {
  for (const auto& [name, c] : closed_form_sweep()) {
    INFO(name);
    const auto r = classify_regression_dependence(c);
    const auto q = classify_quadrant(c);
    if (r == RegressionClass::prd) CHECK(q == QuadrantClass::pqd);
    if (r == RegressionClass::nrd) CHECK(q == QuadrantClass::nqd);
  }
}

TEST_CASE("ordered families are never NEITHER", "[properties]") {
  for (const auto& [name, c] : closed_form_sweep()) {
    if (name.rfind("tent", 0) == 0 || name == "glued") continue;
    INFO(name);
    CHECK(classify_quadrant(c) != QuadrantClass::neither);
  }
}

TEST_CASE("monotone regression under PRD and NRD", "[properties]") {
  const auto my = uniform_marginal(0.0, 10.0);
  for (const auto& [name, c] : closed_form_sweep()) {
    const auto r = classify_regression_dependence(c);
    if (r != RegressionClass::prd && r != RegressionClass::nrd) continue;
    INFO(name);
    const RegressionModel m{c, uniform_marginal(), my};
    const double sign = r == RegressionClass::prd ? 1.0 : -1.0;
    double prev_median = sign * median_regression(m, 0.0);
    double prev_mean = sign * mean_regression(m, 0.01);
    for (int i = 1; i <= 100; ++i) {
      const double x = i / 100.0;
      const double med = sign * median_regression(m, x);
      CHECK(med >= prev_median - 1e-8);
      prev_median = med;
      if (i % 10 == 0 && i < 100) {
        const double mean = sign * mean_regression(m, x);
        CHECK(mean >= prev_mean - 1e-6);
        prev_mean = mean;
      }
    }
  }
}
