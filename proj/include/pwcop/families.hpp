#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwcop/copula.hpp"

namespace pwcop {

namespace families {

class Product final : public CopulaModel {
 public:
  double value(double u, double v) const override { return u * v; }
  bool has_closed_du() const override { return true; }
  double closed_du(double, double v) const override { return v; }
  Family family() const override { return Family::product; }
};

class FrechetUpper final : public CopulaModel {
 public:
  double value(double u, double v) const override { return std::min(u, v); }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override { return v >= u ? 1.0 : 0.0; }
  Family family() const override { return Family::frechet_upper; }
  bool smooth() const override { return false; }
};

class FrechetLower final : public CopulaModel {
 public:
  double value(double u, double v) const override { return std::max(u + v - 1.0, 0.0); }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override { return u + v >= 1.0 ? 1.0 : 0.0; }
  Family family() const override { return Family::frechet_lower; }
  bool smooth() const override { return false; }
};

// Evaluated in log space so that large theta neither overflows u^-theta nor loses
// the (u^-theta + v^-theta - 1) sum to cancellation.
class Clayton final : public CopulaModel {
 public:
  explicit Clayton(double theta) : theta_(theta) {
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("clayton: theta must be > 0, got " + std::to_string(theta));
  }
  double value(double u, double v) const override {
    if (u == 0.0 || v == 0.0) return 0.0;
    const double a = -theta_ * std::log(u), b = -theta_ * std::log(v);
    const double hi = std::max(a, b), lo = std::min(a, b);
    const double s = hi + std::log1p(std::exp(lo - hi) - std::exp(-hi));
    return std::exp(-s / theta_);
  }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    if (v == 0.0) return 0.0;
    if (u == 0.0) return 1.0;
    // du = (1 + t)^(-1/theta - 1) with t = u^theta (v^-theta - 1), t carried as log t
    const double b = -theta_ * std::log(v);
    if (b == 0.0) return 1.0;
    const double log_t =
        theta_ * std::log(u) + (b > 30.0 ? b + std::log1p(-std::exp(-b)) : std::log(std::expm1(b)));
    const double softplus = log_t > 30.0 ? log_t + std::log1p(std::exp(-log_t))
                                         : std::log1p(std::exp(log_t));
    return std::exp((-1.0 / theta_ - 1.0) * softplus);
  }
  Family family() const override { return Family::clayton; }
  std::vector<double> parameters() const override { return {theta_}; }

 private:
  double theta_;
};

// Positive theta uses C = -log(N / D) / theta with
//   N = e^{-tu}(1 - e^{-tv}) + e^{-tv}(1 - e^{-t(1-v)}),  D = 1 - e^{-t},
// a sum of non-negative terms; negative theta follows from C_{-t}(u,v) = u - C_t(u,1-v).
class Frank final : public CopulaModel {
 public:
  explicit Frank(double theta) : theta_(theta) {
    if (theta == 0.0 || !std::isfinite(theta))
      throw std::invalid_argument("frank: theta must be finite and != 0");
  }
  double value(double u, double v) const override {
    if (theta_ > 0) return positive_value(theta_, u, v);
    return std::max(u - positive_value(-theta_, u, 1.0 - v), 0.0);
  }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    if (theta_ > 0) return positive_du(theta_, u, v);
    return 1.0 - positive_du(-theta_, u, 1.0 - v);
  }
  Family family() const override { return Family::frank; }
  std::vector<double> parameters() const override { return {theta_}; }

 private:
  static double numerator(double t, double u, double v) {
    return std::exp(-t * u) * -std::expm1(-t * v) + std::exp(-t * v) * -std::expm1(-t * (1.0 - v));
  }
  static double positive_value(double t, double u, double v) {
    if (u == 0.0 || v == 0.0) return 0.0;
    return -std::log(numerator(t, u, v) / -std::expm1(-t)) / t;
  }
  static double positive_du(double t, double u, double v) {
    if (v == 0.0) return 0.0;
    return std::exp(-t * u) * -std::expm1(-t * v) / numerator(t, u, v);
  }
  double theta_;
};

class Gumbel final : public CopulaModel {
 public:
  explicit Gumbel(double theta) : theta_(theta) {
    if (!(theta >= 1.0) || !std::isfinite(theta))
      throw std::invalid_argument("gumbel: theta must be >= 1, got " + std::to_string(theta));
  }
  double value(double u, double v) const override {
    if (u == 0.0 || v == 0.0) return 0.0;
    const double x = -std::log(u), y = -std::log(v);
    if (x == 0.0) return v;
    if (y == 0.0) return u;
    const double hi = std::max(x, y);
    const double r = std::pow(std::min(x, y) / hi, theta_);
    return std::exp(-hi * std::exp(std::log1p(r) / theta_));
  }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    if (v == 0.0) return 0.0;
    if (v == 1.0 || u == 0.0) return 1.0;
    const double x = -std::log(u), y = -std::log(v);
    if (x == 0.0) return theta_ == 1.0 ? v : 0.0;
    double log_du;
    if (x >= y) {
      const double l = std::log1p(std::pow(y / x, theta_)) / theta_;
      log_du = -x * std::expm1(l) - (theta_ - 1.0) * l;
    } else {
      const double l = std::log1p(std::pow(x / y, theta_)) / theta_;
      log_du = -y * std::exp(l) + x + (theta_ - 1.0) * (std::log(x / y) - l);
    }
    return std::exp(log_du);
  }
  Family family() const override { return Family::gumbel; }
  std::vector<double> parameters() const override { return {theta_}; }

 private:
  double theta_;
};

class Fgm final : public CopulaModel {
 public:
  explicit Fgm(double theta) : theta_(theta) {
    if (!(theta >= -1.0 && theta <= 1.0))
      throw std::invalid_argument("fgm: theta must lie in [-1,1], got " + std::to_string(theta));
  }
  double value(double u, double v) const override {
    return u * v * (1.0 + theta_ * (1.0 - u) * (1.0 - v));
  }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    return v * (1.0 + theta_ * (1.0 - v) * (1.0 - 2.0 * u));
  }
  Family family() const override { return Family::fgm; }
  std::vector<double> parameters() const override { return {theta_}; }

 private:
  double theta_;
};

class Plackett final : public CopulaModel {
 public:
  explicit Plackett(double theta) : theta_(theta) {
    if (!(theta > 0.0) || theta == 1.0 || !std::isfinite(theta))
      throw std::invalid_argument("plackett: theta must be > 0 and != 1");
  }
  double value(double u, double v) const override {
    const double s = 1.0 + (theta_ - 1.0) * (u + v);
    const double root = std::sqrt(discriminant(s, u, v));
    // pick the algebraically equivalent form without cancellation
    if (s >= 0.0) return 2.0 * u * v * theta_ / (s + root);
    return (s - root) / (2.0 * (theta_ - 1.0));
  }
  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    const double s = 1.0 + (theta_ - 1.0) * (u + v);
    return 0.5 * (1.0 - (s - 2.0 * v * theta_) / std::sqrt(discriminant(s, u, v)));
  }
  Family family() const override { return Family::plackett; }
  std::vector<double> parameters() const override { return {theta_}; }

 private:
  double discriminant(double s, double u, double v) const {
    return std::max(s * s - 4.0 * u * v * theta_ * (theta_ - 1.0), 0.0);
  }
  double theta_;
};

/// Mass theta spread uniformly on the segment (0,0)-(theta,1) and mass 1 - theta on
/// (theta,1)-(1,0): Y is a tent function of X.
class TentCopula final : public CopulaModel {
 public:
  explicit TentCopula(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < 1.0))
      throw std::invalid_argument("example1: theta must lie in (0,1)");
  }
  double value(double u, double v) const override {
    if (u <= theta_ * v) return u;
    if (u < 1.0 - (1.0 - theta_) * v) return theta_ * v;
    return u + v - 1.0;
  }
  bool has_closed_du() const override { return true; }
  // the conditional law given u is a point mass at tent(u)
  double closed_du(double u, double v) const override {
    return (theta_ * v >= u || (1.0 - theta_) * v >= 1.0 - u) ? 1.0 : 0.0;
  }
  double diagonal(double t) const override {
    return t <= 1.0 / (2.0 - theta_) ? theta_ * t : 2.0 * t - 1.0;
  }
  Family family() const override { return Family::example1; }
  std::vector<double> parameters() const override { return {theta_}; }
  bool smooth() const override { return false; }
  double theta() const { return theta_; }

 private:
  double theta_;
};

}  // namespace families

inline Copula product_copula() { return Copula(std::make_shared<families::Product>()); }
inline Copula frechet_upper() { return Copula(std::make_shared<families::FrechetUpper>()); }
inline Copula frechet_lower() { return Copula(std::make_shared<families::FrechetLower>()); }
inline Copula clayton(double theta) { return Copula(std::make_shared<families::Clayton>(theta)); }
inline Copula frank(double theta) { return Copula(std::make_shared<families::Frank>(theta)); }
inline Copula gumbel(double theta) { return Copula(std::make_shared<families::Gumbel>(theta)); }
inline Copula fgm(double theta) { return Copula(std::make_shared<families::Fgm>(theta)); }
inline Copula plackett(double theta) { return Copula(std::make_shared<families::Plackett>(theta)); }
inline Copula tent_copula(double theta) {
  return Copula(std::make_shared<families::TentCopula>(theta));
}

/// Number of parameters a closed-form family takes, or -1 if it is not a closed-form family.
inline int family_arity(Family f) {
  switch (f) {
    case Family::product:
    case Family::frechet_upper:
    case Family::frechet_lower: return 0;
    case Family::clayton:
    case Family::frank:
    case Family::gumbel:
    case Family::fgm:
    case Family::plackett:
    case Family::example1: return 1;
    default: return -1;
  }
}

/// Builds a closed-form family from its tag and parameters. Throws std::invalid_argument
/// on a wrong parameter count or an inadmissible value.
inline Copula make_family(Family f, std::span<const double> params = {}) {
  const int arity = family_arity(f);
  if (arity < 0)
    throw std::invalid_argument(std::string(family_name(f)) + " is not a closed-form family");
  if (static_cast<int>(params.size()) != arity)
    throw std::invalid_argument(std::string(family_name(f)) + " takes " + std::to_string(arity) +
                                " parameter(s)");
  switch (f) {
    case Family::product: return product_copula();
    case Family::frechet_upper: return frechet_upper();
    case Family::frechet_lower: return frechet_lower();
    case Family::clayton: return clayton(params[0]);
    case Family::frank: return frank(params[0]);
    case Family::gumbel: return gumbel(params[0]);
    case Family::fgm: return fgm(params[0]);
    case Family::plackett: return plackett(params[0]);
    case Family::example1: return tent_copula(params[0]);
    default: break;
  }
  throw std::invalid_argument("unreachable family");
}

}  // namespace pwcop
