#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pwcop/copula.hpp"

namespace pwcop {

namespace detail {

// Pieces scaled onto vertical slabs [e_j, e_{j+1}] x [0,1]:
//   C(u,v) = (e_{j+1} - e_j) C_j((u - e_j) / (e_{j+1} - e_j), v) + e_j v.
class GluedModel final : public CopulaModel {
 public:
  GluedModel(std::vector<Copula> pieces, std::vector<double> gluing_points)
      : pieces_(std::move(pieces)), points_(std::move(gluing_points)) {
    if (pieces_.empty()) throw std::invalid_argument("glue: at least one piece required");
    if (pieces_.size() != points_.size() + 1)
      throw std::invalid_argument("glue: need exactly one more piece than gluing points");
    double previous = 0.0;
    for (double p : points_) {
      if (!(p > previous && p < 1.0))
        throw std::invalid_argument("glue: gluing points must be strictly increasing in (0,1)");
      previous = p;
    }
    edges_.reserve(points_.size() + 2);
    edges_.push_back(0.0);
    edges_.insert(edges_.end(), points_.begin(), points_.end());
    edges_.push_back(1.0);
  }

  double value(double u, double v) const override {
    const std::size_t j = slab(u);
    return width(j) * pieces_[j](local_u(j, u), v) + edges_[j] * v;
  }

  bool has_closed_du() const override { return true; }
  double closed_du(double u, double v) const override {
    const std::size_t j = slab(u);
    return detail_du(pieces_[j].model(), local_u(j, u), v);
  }

  Family family() const override { return Family::glued; }
  bool smooth() const override { return false; }
  bool numerically_integrated() const override {
    return std::any_of(pieces_.begin(), pieces_.end(),
                       [](const Copula& c) { return c.numerically_integrated(); });
  }

  const std::vector<Copula>& pieces() const { return pieces_; }
  const std::vector<double>& gluing_points() const { return points_; }

  /// Index of the slab containing u; a gluing point belongs to the slab on its right.
  std::size_t slab(double u) const {
    const auto it = std::upper_bound(points_.begin(), points_.end(), u);
    return static_cast<std::size_t>(it - points_.begin());
  }

  double local_u(std::size_t j, double u) const {
    if (u <= edges_[j]) return 0.0;
    if (u >= edges_[j + 1]) return 1.0;
    return std::min((u - edges_[j]) / width(j), 1.0);
  }

 private:
  static double detail_du(const CopulaModel& m, double u, double v) {
    return m.has_closed_du() ? m.closed_du(u, v) : finite_difference_du(m, u, v);
  }
  double width(std::size_t j) const { return edges_[j + 1] - edges_[j]; }

  std::vector<Copula> pieces_;
  std::vector<double> points_;
  std::vector<double> edges_;
};

// The slab [lo, hi] of a copula rescaled back to the unit square:
//   P(u*, v) = (C(lo + (hi - lo) u*, v) - lo v) / (hi - lo).
class SlabPiece final : public CopulaModel {
 public:
  SlabPiece(Copula parent, double lo, double hi) : parent_(std::move(parent)), lo_(lo), hi_(hi) {}

  double value(double u, double v) const override {
    return (parent_(position(u), v) - lo_ * v) / (hi_ - lo_);
  }
  bool has_closed_du() const override { return parent_.model().has_closed_du(); }
  double closed_du(double u, double v) const override {
    return parent_.model().closed_du(position(u), v);
  }
  Family family() const override { return Family::piece; }
  bool smooth() const override { return parent_.smooth(); }
  bool numerically_integrated() const override { return parent_.numerically_integrated(); }

 private:
  double position(double u) const { return u >= 1.0 ? hi_ : lo_ + (hi_ - lo_) * u; }

  Copula parent_;
  double lo_, hi_;
};

}  // namespace detail

/// A copula assembled from pieces glued along vertical sections.
class GluedCopula {
 public:
  GluedCopula(std::vector<Copula> pieces, std::vector<double> gluing_points)
      : model_(std::make_shared<detail::GluedModel>(std::move(pieces), std::move(gluing_points))) {}

  const std::vector<Copula>& pieces() const { return model_->pieces(); }
  const std::vector<double>& gluing_points() const { return model_->gluing_points(); }
  const detail::GluedModel& model() const { return *model_; }

  Copula as_copula() const { return Copula(model_); }
  operator Copula() const { return as_copula(); }

 private:
  std::shared_ptr<const detail::GluedModel> model_;
};

inline GluedCopula glue(std::vector<Copula> pieces, std::vector<double> gluing_points) {
  return GluedCopula(std::move(pieces), std::move(gluing_points));
}

/// dC/du of a glued copula: the active piece's derivative at the rescaled coordinate.
/// At a gluing point the right-hand piece is used.
inline double glued_du(const GluedCopula& g, UnitPoint p) {
  return clamp_unit(g.model().closed_du(p.u, p.v));
}

/// Splits c at theta into the two pieces whose gluing reproduces c.
inline std::pair<Copula, Copula> decompose(const Copula& c, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("decompose: theta must lie in (0,1)");
  return {Copula(std::make_shared<detail::SlabPiece>(c, 0.0, theta)),
          Copula(std::make_shared<detail::SlabPiece>(c, theta, 1.0))};
}

}  // namespace pwcop
