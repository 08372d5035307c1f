#include <cmath>
#include <vector>

#include "pwcop/pwcop.hpp"
#include "test_support.hpp"

using Catch::Approx;
using namespace pwcop;

TEST_CASE("gluing M and W reproduces the tent copula", "[gluing]") {
  for (double theta : {0.25, 0.5, 0.75}) {
    const Copula g = glue({frechet_upper(), frechet_lower()}, {theta});
    double worst = 0.0;
    for (double u : testing::grid01(101))
      for (double v : testing::grid01(101)) worst = std::max(worst, std::abs(g(u, v) - testing::tent_value(u, v, theta)));
    CHECK(worst <= 1e-12);
  }
  const Copula g = glue({frechet_upper(), frechet_lower()}, {0.5});
  CHECK(eval(g, {0.25, 0.4}) == Approx(0.2).margin(1e-15));
}

TEST_CASE("gluing the product copula with itself", "[gluing]") {
  const auto g = glue({product_copula(), product_copula()}, {0.4});
  for (double u : testing::grid01(21))
    for (double v : testing::grid01(21)) {
      CHECK(eval(g, {u, v}) == Approx(u * v).margin(1e-15));
      CHECK(glued_du(g, {u, v}) == Approx(v).margin(1e-15));
    }
}

TEST_CASE("glued derivative picks the active piece", "[gluing]") {
  const auto g = glue({frechet_upper(), frechet_lower()}, {0.5});
  CHECK(glued_du(g, {0.25, 0.6}) == 1.0);
  CHECK(glued_du(g, {0.75, 0.6}) == 1.0);
  CHECK(glued_du(g, {0.75, 0.4}) == 0.0);
  // at the gluing point the right piece decides: W at u* = 0 steps at v = 1
  CHECK(glued_du(g, {0.5, 0.6}) == 0.0);
  CHECK(glued_du(g, {0.5, 1.0}) == 1.0);
}

TEST_CASE("glued derivative matches finite differences inside slabs", "[gluing]") {
  const auto g = glue({clayton(2.0), frank(-6.0), gumbel(1.7)}, {0.3, 0.65});
  const Copula c = g;
  for (double u : {0.05, 0.15, 0.25, 0.35, 0.5, 0.6, 0.7, 0.85, 0.95})
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double fd = testing::central_difference([&](double s) { return c(s, v); }, u, 1e-5);
      CHECK(glued_du(g, {u, v}) == Approx(fd).margin(1e-6));
    }
}

TEST_CASE("glued copulas are copulas and continuous across gluing points", "[gluing]") {
  const auto g = glue({clayton(2.0), fgm(-0.8), plackett(5.0)}, {0.2, 0.7});
  CHECK(check_copula_axioms(g, 101).passes(1e-9));
  const Copula c = g;
  for (double e : g.gluing_points())
    for (double v : testing::grid01(21)) CHECK(c(e - 1e-12, v) == Approx(c(e, v)).margin(1e-10));
}

TEST_CASE("gluing rejects malformed inputs", "[gluing]") {
  CHECK_THROWS_AS(glue({product_copula(), product_copula()}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(glue({product_copula(), product_copula()}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(glue({product_copula(), product_copula(), product_copula()}, {0.6, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(glue({product_copula()}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(glue({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(decompose(product_copula(), 1.0), std::invalid_argument);
}

TEST_CASE("decompose recovers M and W from the tent copula", "[gluing]") {
  for (double theta : {0.3, 0.6}) {
    const auto [left, right] = decompose(tent_copula(theta), theta);
    for (double u : testing::grid01(51))
      for (double v : testing::grid01(51)) {
        CHECK(left(u, v) == Approx(std::min(u, v)).margin(1e-12));
        CHECK(right(u, v) == Approx(std::max(u + v - 1.0, 0.0)).margin(1e-12));
      }
  }
  const auto [a, b] = decompose(product_copula(), 0.3);
  for (double u : testing::grid01(11))
    for (double v : testing::grid01(11)) {
      CHECK(a(u, v) == Approx(u * v).margin(1e-15));
      CHECK(b(u, v) == Approx(u * v).margin(1e-15));
    }
}

TEST_CASE("decompose inverts glue", "[gluing]") {
  const std::vector<std::pair<Copula, Copula>> pairs = {
      {clayton(3.0), frank(-2.0)}, {frechet_upper(), gumbel(2.5)}, {fgm(0.4), plackett(0.1)}};
  for (const auto& [a, b] : pairs)
    for (double theta : {0.25, 0.5, 0.75}) {
      const auto [l, r] = decompose(glue({a, b}, {theta}), theta);
      double worst = 0.0;
      for (double u : testing::grid01(51))
        for (double v : testing::grid01(51))
          worst = std::max({worst, std::abs(l(u, v) - a(u, v)), std::abs(r(u, v) - b(u, v))});
      CHECK(worst <= 1e-9);
    }
}

TEST_CASE("PQD-then-NQD gluing crosses the independence diagonal at the gluing point", "[gluing]") {
  for (double theta : {0.3, 0.5, 0.7}) {
    const Copula g = glue({frechet_upper(), frechet_lower()}, {theta});
    for (double t : testing::grid01(1001)) {
      const double d = diagonal(g, t) - t * t;
      if (t < theta) CHECK(d >= -1e-12);
      if (t > theta) CHECK(d <= 1e-12);
    }
    CHECK(diagonal(g, theta) == Approx(theta * theta).margin(1e-12));
  }
}

TEST_CASE("the reference decomposition has the reversed sign pattern", "[gluing]") {
  const auto model = make_example4_model(0.1);
  const Copula g = glue({example4_pieces(model).first, example4_pieces(model).second}, {0.5});
  for (double t : testing::grid01(101)) {
    if (t <= 0.0 || t >= 1.0) continue;
    const double d = diagonal(g, t) - t * t;
    if (t < 0.45) CHECK(d <= 1e-9);
    if (t > 0.55) CHECK(d >= -1e-9);
  }
}
