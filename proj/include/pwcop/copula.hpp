#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pwcop/marginal.hpp"
#include "pwcop/numerics.hpp"

namespace pwcop {

/// A point of the unit square. Construction rejects coordinates outside [0,1] and NaN.
struct UnitPoint {
  double u;
  double v;

  UnitPoint(double u_, double v_) : u(u_), v(v_) {
    if (!in_unit_interval(u) || !in_unit_interval(v))
      throw DomainError("point (" + std::to_string(u) + ", " + std::to_string(v) +
                        ") outside the unit square");
  }
};

enum class Family {
  product,
  frechet_upper,
  frechet_lower,
  clayton,
  frank,
  gumbel,
  fgm,
  plackett,
  example1,
  glued,
  piece,
  example4,
  example4_left,
  example4_right,
  empirical,
  custom,
};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::product: return "product";
    case Family::frechet_upper: return "frechet-upper";
    case Family::frechet_lower: return "frechet-lower";
    case Family::clayton: return "clayton";
    case Family::frank: return "frank";
    case Family::gumbel: return "gumbel";
    case Family::fgm: return "fgm";
    case Family::plackett: return "plackett";
    case Family::example1: return "example1";
    case Family::glued: return "glued";
    case Family::piece: return "piece";
    case Family::example4: return "example4";
    case Family::example4_left: return "example4-left";
    case Family::example4_right: return "example4-right";
    case Family::empirical: return "empirical";
    case Family::custom: return "custom";
  }
  return "unknown";
}

/// Accepts canonical names plus the short aliases M, W, Pi/independence.
inline std::optional<Family> family_from_name(std::string_view name) {
  if (name == "M" || name == "upper") return Family::frechet_upper;
  if (name == "W" || name == "lower") return Family::frechet_lower;
  if (name == "Pi" || name == "independence") return Family::product;
  for (Family f : {Family::product, Family::frechet_upper, Family::frechet_lower, Family::clayton,
                   Family::frank, Family::gumbel, Family::fgm, Family::plackett, Family::example1,
                   Family::glued, Family::example4, Family::example4_left,
                   Family::example4_right})
    if (family_name(f) == name) return f;
  return std::nullopt;
}

/// Implementation interface for a bivariate copula. Implementations may assume their
/// arguments lie in [0,1]^2; validation happens in the free functions below.
class CopulaModel {
 public:
  virtual ~CopulaModel() = default;

  virtual double value(double u, double v) const = 0;

  /// Closed-form dC/du, right-continuous in v where C has a kink.
  virtual bool has_closed_du() const { return false; }
  virtual double closed_du(double, double) const {
    return std::numeric_limits<double>::quiet_NaN();
  }

  virtual double diagonal(double t) const { return value(t, t); }

  virtual Family family() const = 0;
  virtual std::vector<double> parameters() const { return {}; }

  /// False when C has kinks; selects midpoint instead of Gauss quadrature.
  virtual bool smooth() const { return true; }

  /// True when evaluating C itself involves quadrature or root finding.
  virtual bool numerically_integrated() const { return false; }

  /// out[i * vs.size() + j] = C(us[i], vs[j]). Overridden where per-row or per-column
  /// work can be shared.
  virtual void value_grid(std::span<const double> us, std::span<const double> vs,
                          std::span<double> out) const {
    for (std::size_t i = 0; i < us.size(); ++i)
      for (std::size_t j = 0; j < vs.size(); ++j) out[i * vs.size() + j] = value(us[i], vs[j]);
  }
};

/// Value handle to an immutable copula.
class Copula {
 public:
  explicit Copula(std::shared_ptr<const CopulaModel> model) : model_(std::move(model)) {
    if (!model_) throw std::invalid_argument("null copula model");
  }

  const CopulaModel& model() const { return *model_; }
  std::shared_ptr<const CopulaModel> shared_model() const { return model_; }
  Family family() const { return model_->family(); }
  std::vector<double> parameters() const { return model_->parameters(); }
  bool smooth() const { return model_->smooth(); }
  bool numerically_integrated() const { return model_->numerically_integrated(); }

  /// Unchecked evaluation for inner loops.
  double operator()(double u, double v) const { return model_->value(u, v); }

 private:
  std::shared_ptr<const CopulaModel> model_;
};

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kBisectionTolerance = 1e-10;
inline constexpr int kBisectionMaxIter = 200;

inline double eval(const Copula& c, UnitPoint p) { return c.model().value(p.u, p.v); }

/// dC/du by central difference; one-sided within h of the boundary. Not clamped.
inline double finite_difference_du(const CopulaModel& m, double u, double v,
                                   double h = kFiniteDifferenceStep) {
  if (u < h) return (m.value(u + h, v) - m.value(u, v)) / h;
  if (u > 1.0 - h) return (m.value(u, v) - m.value(u - h, v)) / h;
  return (m.value(u + h, v) - m.value(u - h, v)) / (2.0 * h);
}

namespace detail {
inline double du_unchecked(const CopulaModel& m, double u, double v) {
  return clamp_unit(m.has_closed_du() ? m.closed_du(u, v) : finite_difference_du(m, u, v));
}
}  // namespace detail

/// dC/du at p: closed form when available, else finite differences; clamped to [0,1].
inline double du(const Copula& c, UnitPoint p) { return detail::du_unchecked(c.model(), p.u, p.v); }

/// Generalized inverse of v -> dC/du(u, v): inf{v : du(u, v) >= level}, by bisection.
/// Jumps (singular copulas) resolve to the jump location.
inline double conditional_quantile(const Copula& c, double u, double level) {
  const UnitPoint check(u, level);
  const CopulaModel& m = c.model();
  return bisect_first_true([&](double v) { return detail::du_unchecked(m, u, v) >= level; }, 0.0,
                           1.0, kBisectionTolerance, kBisectionMaxIter);
}

inline double diagonal(const Copula& c, double t) {
  if (!in_unit_interval(t)) throw DomainError("diagonal: t outside [0,1]");
  return c.model().diagonal(t);
}

/// F_{Y|X}(y | x) = dC/du at (F_X(x), F_Y(y)).
inline double conditional_cdf(const Copula& c, const MarginalModel& mx, const MarginalModel& my,
                              double x, double y) {
  if (!mx.contains(x)) throw DomainError("conditional_cdf: x outside the support of X");
  return du(c, UnitPoint(mx.cdf(x), my.cdf(y)));
}

/// Worst violation of one copula axiom and where it occurred.
struct AxiomViolation {
  double magnitude = 0.0;
  double u = 0.0;
  double v = 0.0;

  void record(double amount, double at_u, double at_v) {
    if (amount > magnitude) {
      magnitude = amount;
      u = at_u;
      v = at_v;
    }
  }
};

struct AxiomReport {
  int grid_n = 0;
  AxiomViolation grounded;
  AxiomViolation uniform_margins;
  AxiomViolation two_increasing;  // (u, v) is the lower-left corner of the rectangle
  AxiomViolation frechet_bounds;

  double worst() const {
    return std::max({grounded.magnitude, uniform_margins.magnitude, two_increasing.magnitude,
                     frechet_bounds.magnitude});
  }
  bool passes(double tol) const { return worst() <= tol; }
};

/// Checks the copula axioms on the (n x n) grid {i / (n - 1)}.
inline AxiomReport check_copula_axioms(const Copula& c, int n) {
  if (n < 2) throw std::invalid_argument("check_copula_axioms: n must be >= 2");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / (n - 1);
  grid.back() = 1.0;
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  c.model().value_grid(grid, grid, values);
  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; };

  AxiomReport report;
  report.grid_n = n;
  for (int i = 0; i < n; ++i) {
    const double t = grid[i];
    report.grounded.record(std::abs(at(i, 0)), t, 0.0);
    report.grounded.record(std::abs(at(0, i)), 0.0, t);
    report.uniform_margins.record(std::abs(at(i, n - 1) - t), t, 1.0);
    report.uniform_margins.record(std::abs(at(n - 1, i) - t), 1.0, t);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = grid[i], v = grid[j], value = at(i, j);
      const double lower = std::max(u + v - 1.0, 0.0), upper = std::min(u, v);
      report.frechet_bounds.record(lower - value, u, v);
      report.frechet_bounds.record(value - upper, u, v);
      if (i + 1 < n && j + 1 < n) {
        const double volume = at(i + 1, j + 1) - at(i + 1, j) - at(i, j + 1) + value;
        report.two_increasing.record(-volume, u, v);
      }
    }
  }
  return report;
}

/// Copula defined by arbitrary callables (tests, counterexamples, ad-hoc models).
class FunctionCopula final : public CopulaModel {
 public:
  using Fn = std::function<double(double, double)>;
  FunctionCopula(Fn value, std::optional<Fn> du = std::nullopt, bool smooth = true)
      : value_(std::move(value)), du_(std::move(du)), smooth_(smooth) {}
  double value(double u, double v) const override { return value_(u, v); }
  bool has_closed_du() const override { return du_.has_value(); }
  double closed_du(double u, double v) const override { return (*du_)(u, v); }
  Family family() const override { return Family::custom; }
  bool smooth() const override { return smooth_; }

 private:
  Fn value_;
  std::optional<Fn> du_;
  bool smooth_;
};

inline Copula make_copula(FunctionCopula::Fn value,
                          std::optional<FunctionCopula::Fn> du = std::nullopt,
                          bool smooth = true) {
  return Copula(std::make_shared<FunctionCopula>(std::move(value), std::move(du), smooth));
}

}  // namespace pwcop
