#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "pwcop/copula.hpp"
#include "pwcop/marginal.hpp"

namespace pwcop {

enum class Statistic { median, mean };

inline std::string_view to_string(Statistic s) { return s == Statistic::mean ? "mean" : "median"; }

/// A copula joined with the marginals of X and Y.
struct RegressionModel {
  Copula copula;
  MarginalModel marginal_x;
  MarginalModel marginal_y;
};

/// Tail truncation and node count for the conditional-expectation integral.
struct MeanIntegration {
  double tail_probability = 1e-6;
  int nodes = 512;
  /// Non-convergence is reported when widening the tails by 10x moves the result by more
  /// than this fraction of the integration range.
  double tail_tolerance = 5e-3;
};

/// psi(u): the median of V given U = u.
inline double median_psi(const Copula& c, double u) { return conditional_quantile(c, u, 0.5); }

namespace detail {

inline void require_support(const MarginalModel& mx, double x) {
  if (!mx.contains(x)) throw DomainError("x = " + std::to_string(x) + " outside the support of X");
}

// E[Y | .] = int_0^inf (1 - F) dy - int_-inf^0 F dy, with F the conditional CDF of Y and
// the range cut at the marginal quantiles of Y at eps and 1 - eps (midpoint rule).
inline double truncated_expectation(const std::function<double(double)>& conditional_cdf_y,
                                    const MarginalModel& my, double eps, int nodes) {
  const double a = my.quantile(eps), b = my.quantile(1.0 - eps);
  if (!std::isfinite(a) || !std::isfinite(b))
    throw NumericalError("mean regression: non-finite integration bounds");
  const double h = (b - a) / nodes;
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double y = a + (i + 0.5) * h;
    const double f = conditional_cdf_y(y);
    sum += y >= 0.0 ? 1.0 - f : -f;
  }
  // the rule covers [a, b]; the parts of [0, a) or (b, 0] outside it carry F = 0 or 1
  return sum * h + std::max(a, 0.0) + std::min(b, 0.0);
}

inline double conditional_mean(const Copula& c, double u, const MarginalModel& my,
                               const MeanIntegration& integration) {
  auto cdf = [&](double y) { return du(c, UnitPoint(u, my.cdf(y))); };
  const double result = truncated_expectation(cdf, my, integration.tail_probability, integration.nodes);
  const double wider = truncated_expectation(cdf, my, 10.0 * integration.tail_probability, integration.nodes);
  const double range = my.quantile(1.0 - integration.tail_probability) - my.quantile(integration.tail_probability);
  if (std::abs(result - wider) > integration.tail_tolerance * range)
    throw NumericalError("mean regression: tail truncation did not converge");
  return result;
}

}  // namespace detail

/// mu(x) = F_Y^{-1}(psi(F_X(x))).
inline double median_regression(const RegressionModel& m, double x) {
  detail::require_support(m.marginal_x, x);
  return m.marginal_y.quantile(median_psi(m.copula, m.marginal_x.cdf(x)));
}

/// E[Y | X = x] by quadrature of the conditional CDF.
inline double mean_regression(const RegressionModel& m, double x, const MeanIntegration& integration = {}) {
  detail::require_support(m.marginal_x, x);
  return detail::conditional_mean(m.copula, m.marginal_x.cdf(x), m.marginal_y, integration);
}

/// Break-points in x-space, one copula per induced interval, and the marginals of X and Y.
/// Segment i covers (b_{i-1}, b_i]; the first segment includes the lower end of the support.
class PiecewiseRegressionModel {
 public:
  PiecewiseRegressionModel(std::vector<double> break_points, std::vector<Copula> segment_copulas,
                           MarginalModel marginal_x, MarginalModel marginal_y)
      : break_points_(std::move(break_points)), copulas_(std::move(segment_copulas)),
        marginal_x_(std::move(marginal_x)), marginal_y_(std::move(marginal_y)) {
    if (copulas_.size() != break_points_.size() + 1)
      throw std::invalid_argument("piecewise model: need one more segment than break-points");
    const Interval s = marginal_x_.support();
    double previous_theta = 0.0;
    for (std::size_t i = 0; i < break_points_.size(); ++i) {
      const double b = break_points_[i];
      if (!(b > s.lo && b < s.hi))
        throw std::invalid_argument("piecewise model: break-point outside the interior of X");
      if (i > 0 && !(b > break_points_[i - 1]))
        throw std::invalid_argument("piecewise model: break-points must be strictly increasing");
      const double theta = marginal_x_.cdf(b);
      if (!(theta > previous_theta && theta < 1.0))
        throw std::invalid_argument("piecewise model: gluing points must increase within (0,1)");
      gluing_points_.push_back(theta);
      previous_theta = theta;
    }
    for (std::size_t i = 0; i < copulas_.size(); ++i) {
      const double lo = i == 0 ? s.lo : break_points_[i - 1];
      const double hi = i == break_points_.size() ? s.hi : break_points_[i];
      segment_marginals_.push_back(marginal_x_.truncated(lo, hi));
    }
  }

  const std::vector<double>& break_points() const { return break_points_; }
  const std::vector<double>& gluing_points() const { return gluing_points_; }
  const std::vector<Copula>& segment_copulas() const { return copulas_; }
  const MarginalModel& marginal_x() const { return marginal_x_; }
  const MarginalModel& marginal_y() const { return marginal_y_; }
  std::size_t segment_count() const { return copulas_.size(); }

  /// x <= b_i selects segment i.
  std::size_t segment_index(double x) const {
    return static_cast<std::size_t>(std::lower_bound(break_points_.begin(), break_points_.end(), x) -
                                    break_points_.begin());
  }

  /// F_{X | X in I}(x) for the segment containing x.
  double segment_u(double x) const { return segment_marginals_[segment_index(x)].cdf(x); }

 private:
  std::vector<double> break_points_;
  std::vector<Copula> copulas_;
  MarginalModel marginal_x_;
  MarginalModel marginal_y_;
  std::vector<double> gluing_points_;
  std::vector<MarginalModel> segment_marginals_;
};

inline double piecewise_regression(const PiecewiseRegressionModel& pm, double x,
                                   Statistic statistic = Statistic::median,
                                   const MeanIntegration& integration = {}) {
  detail::require_support(pm.marginal_x(), x);
  const Copula& c = pm.segment_copulas()[pm.segment_index(x)];
  const double u = pm.segment_u(x);
  if (statistic == Statistic::mean) return detail::conditional_mean(c, u, pm.marginal_y(), integration);
  return pm.marginal_y().quantile(median_psi(c, u));
}

}  // namespace pwcop
