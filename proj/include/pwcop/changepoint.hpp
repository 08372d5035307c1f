#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pwcop/copula.hpp"
#include "pwcop/marginal.hpp"

namespace pwcop {

enum class Direction { up, down };

inline std::string_view to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

/// A sign change of g(t) = delta(t) - t^2. `up` means g goes from negative to positive.
struct Crossing {
  double t;
  Direction direction;
};

struct CrossingOptions {
  int grid_n = 512;
  double tol = 1e-4;
  int persistence = 5;
  double refine_tol = 1e-6;
};

struct CrossingReport {
  std::vector<Crossing> crossings;
  /// Places where g returned to the tolerance band (or briefly left it) without a persistent
  /// change of sign.
  std::vector<double> touches;
  int grid_n = 0;
  double tolerance = 0.0;
  int persistence = 0;
};

using DiagonalFunction = std::function<double(double)>;

namespace detail {

struct SignRun {
  int sign;
  int first;
  int last;
};

}  // namespace detail

/// Locates persistent sign changes of delta(t) - t^2 on the grid {i / grid_n}, refining each
/// by bisection. A sign counts once it holds (|g| > tol) for `persistence` consecutive points.
inline CrossingReport diagonal_crossings(const DiagonalFunction& delta, const CrossingOptions& opt = {}) {
  if (opt.grid_n < 64) throw std::invalid_argument("diagonal_crossings: grid_n must be >= 64");
  if (opt.persistence < 1) throw std::invalid_argument("diagonal_crossings: persistence must be >= 1");
  auto g = [&](double t) { return delta(t) - t * t; };

  const int n = opt.grid_n;
  std::vector<double> ts(n - 1), gs(n - 1);
  std::vector<int> signs(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    ts[i] = static_cast<double>(i + 1) / n;
    gs[i] = g(ts[i]);
    signs[i] = gs[i] > opt.tol ? 1 : (gs[i] < -opt.tol ? -1 : 0);
  }

  std::vector<detail::SignRun> persistent;
  for (int i = 0; i < n - 1;) {
    int j = i;
    while (j + 1 < n - 1 && signs[j + 1] == signs[i]) ++j;
    if (signs[i] != 0 && j - i + 1 >= opt.persistence) persistent.push_back({signs[i], i, j});
    i = j + 1;
  }

  CrossingReport report;
  report.grid_n = n;
  report.tolerance = opt.tol;
  report.persistence = opt.persistence;
  for (std::size_t k = 1; k < persistent.size(); ++k) {
    const auto& prev = persistent[k - 1];
    const auto& next = persistent[k];
    if (next.sign == prev.sign) {
      int closest = prev.last + 1;
      for (int i = prev.last + 1; i < next.first; ++i)
        if (std::abs(gs[i]) < std::abs(gs[closest])) closest = i;
      report.touches.push_back(ts[closest]);
      continue;
    }
    double a = ts[prev.last], b = ts[next.first];
    const double ga = gs[prev.last];
    while (b - a > opt.refine_tol * 1e-3) {
      const double mid = 0.5 * (a + b);
      const double gm = g(mid);
      if (gm == 0.0) {
        a = b = mid;
        break;
      }
      if ((gm > 0) == (ga > 0))
        a = mid;
      else
        b = mid;
    }
    report.crossings.push_back({0.5 * (a + b), next.sign > 0 ? Direction::up : Direction::down});
  }
  return report;
}

inline CrossingReport diagonal_crossings(const Copula& c, const CrossingOptions& opt = {}) {
  return diagonal_crossings([&](double t) { return c.model().diagonal(t); }, opt);
}

/// b = F_X^{-1}(theta).
inline double breakpoint_from_gluing_point(double theta, const MarginalModel& mx) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("gluing point must lie in (0,1)");
  return mx.quantile(theta);
}

/// True when delta(t1) < t1^2 - tol and delta(t2) > t2^2 + tol for some grid points, which
/// rules out both PQD and NQD.
inline bool pqd_nqd_prescreen(const DiagonalFunction& delta, int grid_n = 512, double tol = 1e-4) {
  if (grid_n < 64) throw std::invalid_argument("pqd_nqd_prescreen: grid_n must be >= 64");
  bool below = false, above = false;
  for (int i = 1; i < grid_n; ++i) {
    const double t = static_cast<double>(i) / grid_n;
    const double gap = delta(t) - t * t;
    below = below || gap < -tol;
    above = above || gap > tol;
  }
  return below && above;
}

inline bool pqd_nqd_prescreen(const Copula& c, int grid_n = 512, double tol = 1e-4) {
  return pqd_nqd_prescreen([&](double t) { return c.model().diagonal(t); }, grid_n, tol);
}

}  // namespace pwcop
