#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pwcop/copula.hpp"
#include "pwcop/families.hpp"
#include "pwcop/marginal.hpp"
#include "pwcop/numerics.hpp"
#include "pwcop/sample.hpp"

namespace pwcop {

// ---------------------------------------------------------------------------------------
// Tent model: X ~ U(0,1), Y = X / theta on [0, theta] and (1 - X) / (1 - theta) after.

inline Copula example1_copula(double theta) { return tent_copula(theta); }

inline double tent(double x, double theta) {
  return x <= theta ? x / theta : (1.0 - x) / (1.0 - theta);
}

inline Sample simulate_example1(std::size_t n, double theta, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_example1: n must be >= 1");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("simulate_example1: theta must lie in (0,1)");
  Rng rng(seed);
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    o.x = rng.uniform();
    o.y = tent(o.x, theta);
  }
  return Sample::simulated(std::move(obs));
}

// ---------------------------------------------------------------------------------------
// Parabola-plus-noise model: X ~ U(0,1), Y = (X - 0.5)^2 + k * eps, eps ~ N(0,1).
//
//   F_Y(y)  = int_0^1 Phi((y - (r - 0.5)^2) / k) dr
//   C(u, v) = int_0^u Phi((F_Y^{-1}(v) - (r - 0.5)^2) / k) dr

class Example4Model {
 public:
  static constexpr int kDefaultNodes = 256;
  static constexpr int kTableSize = 2048;

  explicit Example4Model(double k, int nodes = kDefaultNodes) : k_(k), nodes_(nodes) {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("example4: k must be > 0");
    if (nodes < 8) throw std::invalid_argument("example4: need at least 8 quadrature nodes");
    const double lo = -4.0 * k, hi = 0.25 + 4.0 * k;
    table_y_.resize(kTableSize);
    table_f_.resize(kTableSize);
    for (int i = 0; i < kTableSize; ++i) {
      table_y_[i] = lo + (hi - lo) * i / (kTableSize - 1);
      table_f_[i] = marginal_y_cdf(table_y_[i]);
    }
  }

  double k() const { return k_; }
  int nodes() const { return nodes_; }

  /// int_a^b Phi((q - (r - 0.5)^2) / k) dr.
  double integrate_conditional(double a, double b, double q) const {
    if (b <= a) return 0.0;
    return integrate_gauss_legendre(
        [&](double r) { return normal_cdf((q - (r - 0.5) * (r - 0.5)) / k_); }, a, b, nodes_);
  }

  double marginal_y_cdf(double y) const { return integrate_conditional(0.0, 1.0, y); }

  double marginal_y_density(double y) const {
    return integrate_gauss_legendre(
        [&](double r) { return normal_pdf((y - (r - 0.5) * (r - 0.5)) / k_) / k_; }, 0.0, 1.0,
        nodes_);
  }

  /// F_Y^{-1}(v): table lookup for a bracket, then safeguarded Newton. +-inf at v = 1 / 0.
  double marginal_y_quantile(double v) const {
    if (v <= 0.0) return -std::numeric_limits<double>::infinity();
    if (v >= 1.0) return std::numeric_limits<double>::infinity();
    double lo, hi;
    if (v < table_f_.front()) {
      hi = table_y_.front();
      lo = hi - k_;
      while (marginal_y_cdf(lo) > v) {
        hi = lo;
        lo -= 2.0 * (table_y_.front() - lo) + k_;
        if (lo < -1e3 * (1.0 + k_)) throw NumericalError("example4: quantile bracket search failed");
      }
    } else if (v > table_f_.back()) {
      lo = table_y_.back();
      hi = lo + k_;
      while (marginal_y_cdf(hi) < v) {
        lo = hi;
        hi += 2.0 * (hi - table_y_.back()) + k_;
        if (hi > 1e3 * (1.0 + k_)) throw NumericalError("example4: quantile bracket search failed");
      }
    } else {
      const auto j = static_cast<std::size_t>(
          std::upper_bound(table_f_.begin(), table_f_.end(), v) - table_f_.begin());
      if (j >= table_f_.size()) return table_y_.back();
      lo = table_y_[j - 1];
      hi = table_y_[j];
    }
    double y = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
      const double f = marginal_y_cdf(y) - v;
      if (f == 0.0) return y;
      if (f > 0.0)
        hi = y;
      else
        lo = y;
      const double density = marginal_y_density(y);
      double next = density > 0.0 ? y - f / density : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) <= 1e-15 * (1.0 + std::abs(y)) || hi - lo <= 1e-15) return next;
      y = next;
    }
    return y;
  }

 private:
  double k_;
  int nodes_;
  std::vector<double> table_y_, table_f_;
};

namespace detail {

// Shared plumbing for the numerically integrated copula and its two halves. Each is
//   value(u, v) = scale * int_0^{a + b u} Phi((q(v) - (r - 0.5)^2) / k) dr - offset * v
// with closed-form du = scale * b * Phi((q(v) - (a + b u - 0.5)^2) / k).
class Example4Family final : public CopulaModel {
 public:
  Example4Family(std::shared_ptr<const Example4Model> model, Family tag, double a, double b,
                 double scale, double offset)
      : model_(std::move(model)), tag_(tag), a_(a), b_(b), scale_(scale), offset_(offset) {}

  double value(double u, double v) const override {
    if (v <= 0.0 || u <= 0.0) return 0.0;
    if (v >= 1.0) return u;
    return value_at(u, v, model_->marginal_y_quantile(v));
  }

  void value_grid(std::span<const double> us, std::span<const double> vs,
                  std::span<double> out) const override {
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const double v = vs[j];
      const bool interior = v > 0.0 && v < 1.0;
      const double q = interior ? model_->marginal_y_quantile(v) : 0.0;
      for (std::size_t i = 0; i < us.size(); ++i) {
        const double u = us[i];
        double c;
        if (v <= 0.0 || u <= 0.0)
          c = 0.0;
        else if (v >= 1.0)
          c = u;
        else
          c = value_at(u, v, q);
        out[i * vs.size() + j] = c;
      }
    }
  }

  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    const double q = model_->marginal_y_quantile(v);
    const double r = a_ + b_ * u - 0.5;
    return scale_ * b_ * normal_cdf((q - r * r) / model_->k());
  }

  Family family() const override { return tag_; }
  std::vector<double> parameters() const override { return {model_->k()}; }
  bool numerically_integrated() const override { return true; }
  const Example4Model& model() const { return *model_; }

 private:
  double value_at(double u, double v, double q) const {
    return scale_ * model_->integrate_conditional(0.0, a_ + b_ * u, q) - offset_ * v;
  }

  std::shared_ptr<const Example4Model> model_;
  Family tag_;
  double a_, b_, scale_, offset_;
};

}  // namespace detail

inline std::shared_ptr<const Example4Model> make_example4_model(
    double k, int nodes = Example4Model::kDefaultNodes) {
  return std::make_shared<const Example4Model>(k, nodes);
}

inline double example4_marginal_y(const Example4Model& model, double y) {
  return model.marginal_y_cdf(y);
}

/// F_Y of the model as a MarginalModel (serializes as "example4_y").
inline MarginalModel example4_y_marginal(std::shared_ptr<const Example4Model> model) {
  return MarginalModel(std::make_shared<FunctionMarginal>(
      "example4_y", std::vector<double>{model->k()},
      [model](double y) { return model->marginal_y_cdf(y); },
      [model](double p) { return model->marginal_y_quantile(p); }, Interval{}));
}

inline Copula example4_copula(std::shared_ptr<const Example4Model> model) {
  return Copula(std::make_shared<detail::Example4Family>(std::move(model), Family::example4, 0.0,
                                                         1.0, 1.0, 0.0));
}

/// The halves of the gluing decomposition at theta = 1/2 in closed form:
///   C1(u*, v) = 2 int_0^{u*/2} Phi(...) dr,          dC1/du* = Phi((q - 0.25 (1 - u*)^2) / k)
///   C2(u*, v) = 2 int_0^{(u*+1)/2} Phi(...) dr - v,  dC2/du* = Phi((q - 0.25 u*^2) / k)
inline std::pair<Copula, Copula> example4_pieces(std::shared_ptr<const Example4Model> model) {
  return {Copula(std::make_shared<detail::Example4Family>(model, Family::example4_left, 0.0, 0.5,
                                                          2.0, 0.0)),
          Copula(std::make_shared<detail::Example4Family>(model, Family::example4_right, 0.5, 0.5,
                                                          2.0, 1.0))};
}

inline Sample simulate_example4(std::size_t n, double k, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_example4: n must be >= 1");
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("simulate_example4: k must be >= 0");
  Rng rng(seed);
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    o.x = rng.uniform();
    const double eps = rng.normal();
    o.y = (o.x - 0.5) * (o.x - 0.5) + k * eps;
  }
  return Sample::simulated(std::move(obs));
}

}  // namespace pwcop
