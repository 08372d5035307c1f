#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pwcop/copula.hpp"
#include "pwcop/numerics.hpp"

namespace pwcop {

enum class QuadrantClass { pqd, nqd, neither, independent_like };
enum class RegressionClass { prd, nrd, neither, constant };

inline std::string_view to_string(QuadrantClass q) {
  switch (q) {
    case QuadrantClass::pqd: return "PQD";
    case QuadrantClass::nqd: return "NQD";
    case QuadrantClass::neither: return "NEITHER";
    case QuadrantClass::independent_like: return "INDEPENDENT-LIKE";
  }
  return "?";
}

inline std::string_view to_string(RegressionClass r) {
  switch (r) {
    case RegressionClass::prd: return "PRD";
    case RegressionClass::nrd: return "NRD";
    case RegressionClass::neither: return "NEITHER";
    case RegressionClass::constant: return "CONSTANT";
  }
  return "?";
}

inline constexpr int kSmoothQuadratureNodes = 64;
inline constexpr int kKinkedQuadratureNodes = 512;
inline constexpr int kClassificationGrid = 64;

/// Default classification tolerance, matched to how accurately c can be evaluated.
inline double default_classification_tolerance(const Copula& c) {
  return c.numerically_integrated() ? 1e-4 : 1e-6;
}

namespace detail {

// Tensor-product rule on the unit square: Gauss–Legendre for smooth copulas, composite
// midpoint for copulas with kinks. quad_n == 0 picks the default node count.
inline QuadratureRule unit_square_rule(const Copula& c, int quad_n) {
  if (quad_n == 0) quad_n = c.smooth() ? kSmoothQuadratureNodes : kKinkedQuadratureNodes;
  if (quad_n < 8) throw std::invalid_argument("quadrature needs at least 8 nodes per axis");
  return c.smooth() ? gauss_legendre_on(quad_n, 0.0, 1.0) : midpoint_on(quad_n, 0.0, 1.0);
}

template <class Integrand>
double integrate_unit_square(const Copula& c, int quad_n, Integrand&& f) {
  const QuadratureRule rule = unit_square_rule(c, quad_n);
  const std::size_t n = rule.nodes.size();
  std::vector<double> values(n * n);
  c.model().value_grid(rule.nodes, rule.nodes, values);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      row += rule.weights[j] * f(values[i * n + j], rule.nodes[i], rule.nodes[j]);
    sum += rule.weights[i] * row;
  }
  return sum;
}

inline std::vector<double> interior_grid(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i + 1) / (n + 1);
  return g;
}

}  // namespace detail

/// rho = 12 * int int C(u,v) du dv - 3, clamped to [-1, 1].
inline double spearman_rho(const Copula& c, int quad_n = 0) {
  const double integral =
      detail::integrate_unit_square(c, quad_n, [](double cv, double, double) { return cv; });
  return std::clamp(12.0 * integral - 3.0, -1.0, 1.0);
}

/// sigma = 12 * int int |C(u,v) - uv| du dv, clamped to [0, 1].
inline double schweizer_wolff_sigma(const Copula& c, int quad_n = 0) {
  const double integral = detail::integrate_unit_square(
      c, quad_n, [](double cv, double u, double v) { return std::abs(cv - u * v); });
  return std::clamp(12.0 * integral, 0.0, 1.0);
}

inline QuadrantClass classify_quadrant(const Copula& c, int grid_n = kClassificationGrid,
                                       double tol = -1.0) {
  if (grid_n < 8) throw std::invalid_argument("classify_quadrant: grid_n must be >= 8");
  if (tol < 0.0) tol = default_classification_tolerance(c);
  const auto grid = detail::interior_grid(grid_n);
  std::vector<double> values(grid.size() * grid.size());
  c.model().value_grid(grid, grid, values);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double s = values[i * grid.size() + j] - grid[i] * grid[j];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  if (hi <= tol && lo >= -tol) return QuadrantClass::independent_like;
  if (lo >= -tol) return QuadrantClass::pqd;
  if (hi <= tol) return QuadrantClass::nqd;
  return QuadrantClass::neither;
}

/// Tests u -> dC/du(u, v) for monotonicity by adjacent-pair comparisons on an interior grid.
inline RegressionClass classify_regression_dependence(const Copula& c,
                                                      int grid_n = kClassificationGrid,
                                                      double tol = -1.0) {
  if (grid_n < 8)
    throw std::invalid_argument("classify_regression_dependence: grid_n must be >= 8");
  if (tol < 0.0) tol = default_classification_tolerance(c);
  const auto grid = detail::interior_grid(grid_n);
  bool non_increasing = true, non_decreasing = true, flat = true;
  bool strict_decrease = false, strict_increase = false;
  for (double v : grid) {
    double previous = detail::du_unchecked(c.model(), grid.front(), v);
    const double first = previous;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double current = detail::du_unchecked(c.model(), grid[i], v);
      const double step = current - previous;
      if (step > tol) {
        non_increasing = false;
        strict_increase = true;
      }
      if (step < -tol) {
        non_decreasing = false;
        strict_decrease = true;
      }
      if (std::abs(current - first) > tol) flat = false;
      previous = current;
    }
  }
  if (flat) return RegressionClass::constant;
  if (non_increasing && strict_decrease) return RegressionClass::prd;
  if (non_decreasing && strict_increase) return RegressionClass::nrd;
  return RegressionClass::neither;
}

struct DependenceReport {
  double rho = 0.0;
  double sigma = 0.0;
  QuadrantClass quadrant_class = QuadrantClass::neither;
  RegressionClass regression_class = RegressionClass::neither;
  int grid_n = kClassificationGrid;
  double tolerance = 0.0;
};

struct DependenceOptions {
  int quad_n = 0;  // 0: default per smoothness
  int grid_n = kClassificationGrid;
  double tolerance = -1.0;  // < 0: default per evaluator accuracy
};

inline DependenceReport dependence_report(const Copula& c, const DependenceOptions& opt = {}) {
  DependenceReport r;
  r.tolerance = opt.tolerance < 0.0 ? default_classification_tolerance(c) : opt.tolerance;
  r.grid_n = opt.grid_n;
  r.rho = spearman_rho(c, opt.quad_n);
  r.sigma = schweizer_wolff_sigma(c, opt.quad_n);
  r.quadrant_class = classify_quadrant(c, opt.grid_n, r.tolerance);
  r.regression_class = classify_regression_dependence(c, opt.grid_n, r.tolerance);
  return r;
}

}  // namespace pwcop
