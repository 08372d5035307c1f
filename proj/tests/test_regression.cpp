#include <cmath>
#include <vector>

#include "pwcop/pwcop.hpp"
#include "test_support.hpp"

using Catch::Approx;
using namespace pwcop;

namespace {

RegressionModel uniform_model(const Copula& c) { return {c, uniform_marginal(), uniform_marginal()}; }

}  // namespace

TEST_CASE("median psi of basic copulas", "[regression]") {
  for (double u : {0.1, 0.35, 0.8}) {
    CHECK(median_psi(product_copula(), u) == Approx(0.5).margin(1e-9));
    CHECK(median_psi(frechet_upper(), u) == Approx(u).margin(1e-9));
    CHECK(median_psi(frechet_lower(), u) == Approx(1 - u).margin(1e-9));
  }
}

TEST_CASE("median regression reproduces the tent", "[regression]") {
  const auto m = uniform_model(tent_copula(0.5));
  CHECK(median_regression(m, 0.25) == Approx(0.5).margin(1e-9));
  for (double theta : {0.3, 0.6})
    for (double x : testing::grid01(101))
      CHECK(median_regression(uniform_model(tent_copula(theta)), x) ==
            Approx(tent(x, theta)).margin(1e-9));
  CHECK_THROWS_AS(median_regression(m, 1.5), DomainError);
}

TEST_CASE("median regression through independence is constant", "[regression]") {
  const RegressionModel m{product_copula(), uniform_marginal(-2.0, 5.0), uniform_marginal(1.0, 3.0)};
  for (double x : {-2.0, 0.0, 4.9}) CHECK(median_regression(m, x) == Approx(2.0).margin(1e-8));
}

TEST_CASE("mean regression", "[regression]") {
  CHECK(mean_regression(uniform_model(product_copula()), 0.3) == Approx(0.5).margin(1e-6));
  CHECK(mean_regression(uniform_model(tent_copula(0.5)), 0.7) == Approx(0.6).margin(1e-3));
  // Clayton mean regression against an independent quadrature of v dF(v|u)
  const auto c = clayton(2.0);
  const double u = 0.3;
  const double oracle = 1.0 - testing::simpson([&](double v) { return c.model().closed_du(u, v); }, 0.0, 1.0, 2000);
  CHECK(mean_regression(uniform_model(c), u) == Approx(oracle).margin(1e-5));
}

TEST_CASE("regression under the parabola model", "[regression]") {
  const auto model = make_example4_model(0.1);
  const RegressionModel m{example4_copula(model), uniform_marginal(), example4_y_marginal(model)};
  CHECK(median_regression(m, 0.3) == Approx(0.04).margin(1e-6));
  CHECK(mean_regression(m, 0.8) == Approx(0.09).margin(1e-2));
  for (double x : {0.2, 0.45, 0.7}) CHECK(mean_regression(m, x) == Approx(median_regression(m, x)).margin(2e-2));
}

TEST_CASE("two-segment tent model", "[regression]") {
  const PiecewiseRegressionModel pm({0.5}, {frechet_upper(), frechet_lower()}, uniform_marginal(), uniform_marginal());
  CHECK(piecewise_regression(pm, 0.25) == Approx(0.5).margin(1e-9));
  CHECK(piecewise_regression(pm, 0.7) == Approx(0.6).margin(1e-9));
  CHECK(pm.segment_index(0.5) == 0);
  CHECK(pm.segment_index(0.50001) == 1);
  CHECK(pm.gluing_points() == std::vector<double>{0.5});
  CHECK_THROWS_AS(piecewise_regression(pm, -0.1), DomainError);
}

TEST_CASE("all-independent segments give a constant", "[regression]") {
  const PiecewiseRegressionModel pm({0.2, 0.7}, {product_copula(), product_copula(), product_copula()},
                                    uniform_marginal(), uniform_marginal());
  for (double x : testing::grid01(21)) CHECK(piecewise_regression(pm, x) == Approx(0.5).margin(1e-9));
}

TEST_CASE("piecewise model equals regression through the glued copula", "[regression]") {
  const auto mx = uniform_marginal(1.0, 3.0);
  const auto my = uniform_marginal(-1.0, 1.0);
  const std::vector<std::pair<Copula, Copula>> pairs = {
      {clayton(2.0), frank(-4.0)}, {frechet_upper(), frechet_lower()}, {gumbel(1.5), plackett(0.2)}};
  for (const auto& [a, b] : pairs)
    for (double theta : {0.3, 0.6}) {
      const double bp = mx.quantile(theta);
      const RegressionModel glued{glue({a, b}, {theta}), mx, my};
      const PiecewiseRegressionModel pm({bp}, {a, b}, mx, my);
      for (int i = 0; i <= 100; ++i) {
        const double x = 1.0 + 2.0 * i / 100.0;
        if (std::abs(x - bp) < 1e-12) continue;
        CHECK(piecewise_regression(pm, x) == Approx(median_regression(glued, x)).margin(1e-8));
      }
    }
}

TEST_CASE("parabola decomposition yields a down-then-up regression", "[regression]") {
  const auto model = make_example4_model(0.1);
  const auto [c1, c2] = example4_pieces(model);
  const PiecewiseRegressionModel pm({0.5}, {c1, c2}, uniform_marginal(), example4_y_marginal(model));
  double previous = piecewise_regression(pm, 0.0);
  for (int i = 1; i <= 50; ++i) {
    const double mu = piecewise_regression(pm, i / 100.0);
    CHECK(mu <= previous + 1e-9);
    previous = mu;
  }
  for (int i = 51; i <= 100; ++i) {
    const double mu = piecewise_regression(pm, i / 100.0);
    CHECK(mu >= previous - 1e-9);
    previous = mu;
  }
}

TEST_CASE("piecewise model validation", "[regression]") {
  CHECK_THROWS_AS(PiecewiseRegressionModel({0.5}, {product_copula()}, uniform_marginal(), uniform_marginal()),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseRegressionModel({1.0}, {product_copula(), product_copula()}, uniform_marginal(),
                                           uniform_marginal()),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseRegressionModel({0.6, 0.4}, {product_copula(), product_copula(), product_copula()},
                                           uniform_marginal(), uniform_marginal()),
                  std::invalid_argument);
}
