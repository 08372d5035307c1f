#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwcop/numerics.hpp"

namespace pwcop {

/// Closed interval, possibly unbounded on either side.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
};

class MarginalImpl {
 public:
  virtual ~MarginalImpl() = default;
  virtual double cdf(double x) const = 0;
  /// Generalized inverse, p in [0, 1].
  virtual double quantile(double p) const = 0;
  virtual Interval support() const = 0;
};

/// A univariate distribution given by its CDF and quantile function.
/// Immutable and cheap to copy.
class MarginalModel {
 public:
  explicit MarginalModel(std::shared_ptr<const MarginalImpl> impl) : impl_(std::move(impl)) {}

  double cdf(double x) const {
    if (std::isnan(x)) throw DomainError("marginal cdf: NaN argument");
    return impl_->cdf(x);
  }

  double quantile(double p) const {
    if (!in_unit_interval(p)) throw DomainError("marginal quantile: probability outside [0,1]");
    return impl_->quantile(p);
  }

  Interval support() const { return impl_->support(); }
  bool contains(double x) const { return support().contains(x); }

  /// Conditional distribution of X given lo < X <= hi.
  MarginalModel truncated(double lo, double hi) const;

  const MarginalImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const MarginalImpl> impl_;
};

class UniformMarginal final : public MarginalImpl {
 public:
  UniformMarginal(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("uniform marginal requires finite lo < hi");
  }
  double cdf(double x) const override { return clamp_unit((x - lo_) / (hi_ - lo_)); }
  double quantile(double p) const override { return p >= 1.0 ? hi_ : lo_ + p * (hi_ - lo_); }
  Interval support() const override { return {lo_, hi_}; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

/// Piecewise-linear CDF through knots (x_j, p_j) with p_0 = 0 and p_last = 1.
class EmpiricalMarginal final : public MarginalImpl {
 public:
  EmpiricalMarginal(std::vector<double> xs, std::vector<double> ps)
      : xs_(std::move(xs)), ps_(std::move(ps)) {
    if (xs_.size() < 2 || xs_.size() != ps_.size())
      throw std::invalid_argument("empirical marginal needs >= 2 knots of matching size");
    for (std::size_t i = 1; i < xs_.size(); ++i)
      if (!(xs_[i] > xs_[i - 1]) || !(ps_[i] > ps_[i - 1]))
        throw std::invalid_argument("empirical marginal knots must be strictly increasing");
    if (ps_.front() != 0.0 || ps_.back() != 1.0)
      throw std::invalid_argument("empirical marginal knot probabilities must span [0,1]");
  }

  double cdf(double x) const override {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    const double w = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ps_[j - 1] + w * (ps_[j] - ps_[j - 1]);
  }

  double quantile(double p) const override {
    if (p <= 0.0) return xs_.front();
    if (p >= 1.0) return xs_.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(ps_.begin(), ps_.end(), p) - ps_.begin());
    const double w = (p - ps_[j - 1]) / (ps_[j] - ps_[j - 1]);
    return xs_[j - 1] + w * (xs_[j] - xs_[j - 1]);
  }

  Interval support() const override { return {xs_.front(), xs_.back()}; }
  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_p() const { return ps_; }

 private:
  std::vector<double> xs_, ps_;
};

/// Marginal defined by user-supplied functions. `name` and `params` identify it for
/// serialization (see model_io.hpp).
class FunctionMarginal final : public MarginalImpl {
 public:
  FunctionMarginal(std::string name, std::vector<double> params, std::function<double(double)> cdf,
                   std::function<double(double)> quantile, Interval support)
      : name_(std::move(name)), params_(std::move(params)), cdf_(std::move(cdf)),
        quantile_(std::move(quantile)), support_(support) {}

  double cdf(double x) const override { return cdf_(x); }
  double quantile(double p) const override { return quantile_(p); }
  Interval support() const override { return support_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::string name_;
  std::vector<double> params_;
  std::function<double(double)> cdf_, quantile_;
  Interval support_;
};

class TruncatedMarginal final : public MarginalImpl {
 public:
  TruncatedMarginal(MarginalModel base, double lo, double hi)
      : base_(std::move(base)), lo_(lo), hi_(hi) {
    const Interval s = base_.support();
    lo_ = std::max(lo_, s.lo);
    hi_ = std::min(hi_, s.hi);
    cdf_lo_ = base_.cdf(lo_);
    cdf_hi_ = base_.cdf(hi_);
    if (!(cdf_hi_ > cdf_lo_)) throw std::invalid_argument("truncation interval has zero mass");
  }
  double cdf(double x) const override {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return clamp_unit((base_.cdf(x) - cdf_lo_) / (cdf_hi_ - cdf_lo_));
  }
  double quantile(double p) const override {
    return base_.quantile(clamp_unit(cdf_lo_ + p * (cdf_hi_ - cdf_lo_)));
  }
  Interval support() const override { return {lo_, hi_}; }
  double mass_below_lo() const { return cdf_lo_; }
  double mass_below_hi() const { return cdf_hi_; }

 private:
  MarginalModel base_;
  double lo_, hi_;
  double cdf_lo_ = 0.0, cdf_hi_ = 1.0;
};

inline MarginalModel MarginalModel::truncated(double lo, double hi) const {
  return MarginalModel(std::make_shared<TruncatedMarginal>(*this, lo, hi));
}

inline MarginalModel uniform_marginal(double lo = 0.0, double hi = 1.0) {
  return MarginalModel(std::make_shared<UniformMarginal>(lo, hi));
}

/// Empirical marginal from observations: sorted distinct values at probabilities
/// (i - 1) / (n - 1) of their (average) order-statistic position, joined linearly.
/// With distinct values the quantile at 1/2 is the usual sample median.
inline MarginalModel empirical_marginal(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  if (sorted.size() < 2) throw DataError("empirical marginal needs at least 2 observations");
  for (double x : sorted)
    if (!std::isfinite(x)) throw DataError("empirical marginal: non-finite observation");
  std::sort(sorted.begin(), sorted.end());
  const double denom = static_cast<double>(sorted.size() - 1);
  std::vector<double> xs, ps;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    xs.push_back(sorted[i]);
    ps.push_back(0.5 * static_cast<double>(i + j) / denom);
    i = j + 1;
  }
  if (xs.size() < 2) throw DataError("empirical marginal needs at least 2 distinct values");
  ps.front() = 0.0;
  ps.back() = 1.0;
  return MarginalModel(std::make_shared<EmpiricalMarginal>(std::move(xs), std::move(ps)));
}

}  // namespace pwcop
