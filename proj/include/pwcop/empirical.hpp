#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwcop/changepoint.hpp"
#include "pwcop/copula.hpp"
#include "pwcop/dependence.hpp"
#include "pwcop/families.hpp"
#include "pwcop/marginal.hpp"
#include "pwcop/regression.hpp"
#include "pwcop/sample.hpp"

namespace pwcop {

/// Rank-transformed sample: coordinates are (mid)ranks / (n + 1), strictly inside (0,1).
struct PseudoSample {
  std::vector<double> u;
  std::vector<double> v;

  std::size_t size() const { return u.size(); }
};

/// 1-based ranks with ties sharing their average rank.
inline std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline std::vector<double> scaled_ranks(std::span<const double> values) {
  auto r = midranks(values);
  const double denom = static_cast<double>(values.size()) + 1.0;
  for (double& x : r) x /= denom;
  return r;
}

inline PseudoSample pseudo_observations(const Sample& s) {
  if (s.size() < 2) throw DataError("pseudo_observations needs at least 2 observations");
  const auto xs = s.xs(), ys = s.ys();
  return {scaled_ranks(xs), scaled_ranks(ys)};
}

/// (1/n) * #{i : u_i <= u, v_i <= v}.
inline double empirical_copula(const PseudoSample& ps, UnitPoint p) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps.u[i] <= p.u && ps.v[i] <= p.v) ++count;
  return ps.size() == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(ps.size());
}

/// Pearson correlation of the pseudo-observations (sample Spearman rho).
inline double sample_spearman(const PseudoSample& ps) {
  const double n = static_cast<double>(ps.size());
  const double mu = std::accumulate(ps.u.begin(), ps.u.end(), 0.0) / n;
  const double mv = std::accumulate(ps.v.begin(), ps.v.end(), 0.0) / n;
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double du_ = ps.u[i] - mu, dv = ps.v[i] - mv;
    suv += du_ * dv;
    suu += du_ * du_;
    svv += dv * dv;
  }
  if (suu == 0.0 || svv == 0.0) return 0.0;
  return suv / std::sqrt(suu * svv);
}

namespace detail {

class EmpiricalCopulaModel final : public CopulaModel {
 public:
  explicit EmpiricalCopulaModel(PseudoSample ps) : ps_(std::move(ps)) {
    if (ps_.size() == 0 || ps_.u.size() != ps_.v.size())
      throw DataError("empirical copula needs a non-empty pseudo-sample");
    maxima_.resize(ps_.size());
    for (std::size_t i = 0; i < ps_.size(); ++i) maxima_[i] = std::max(ps_.u[i], ps_.v[i]);
    std::sort(maxima_.begin(), maxima_.end());
  }

  double value(double u, double v) const override { return empirical_copula(ps_, UnitPoint(u, v)); }

  double diagonal(double t) const override {
    const auto count = std::upper_bound(maxima_.begin(), maxima_.end(), t) - maxima_.begin();
    return static_cast<double>(count) / static_cast<double>(maxima_.size());
  }

  // Bins every observation into the first grid cell that covers it, then takes 2-D prefix
  // sums: O(n log G + G^2) instead of O(n G^2).
  void value_grid(std::span<const double> us, std::span<const double> vs,
                  std::span<double> out) const override {
    if (!std::is_sorted(us.begin(), us.end()) || !std::is_sorted(vs.begin(), vs.end())) {
      CopulaModel::value_grid(us, vs, out);
      return;
    }
    const std::size_t gu = us.size(), gv = vs.size();
    std::vector<double> counts(gu * gv, 0.0);
    for (std::size_t k = 0; k < ps_.size(); ++k) {
      const auto a = static_cast<std::size_t>(std::lower_bound(us.begin(), us.end(), ps_.u[k]) - us.begin());
      const auto b = static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), ps_.v[k]) - vs.begin());
      if (a < gu && b < gv) counts[a * gv + b] += 1.0;
    }
    for (std::size_t i = 0; i < gu; ++i)
      for (std::size_t j = 0; j < gv; ++j) {
        double c = counts[i * gv + j];
        if (i > 0) c += counts[(i - 1) * gv + j];
        if (j > 0) c += counts[i * gv + j - 1];
        if (i > 0 && j > 0) c -= counts[(i - 1) * gv + j - 1];
        counts[i * gv + j] = c;
      }
    const double n = static_cast<double>(ps_.size());
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = counts[idx] / n;
  }

  Family family() const override { return Family::empirical; }
  bool smooth() const override { return false; }
  const PseudoSample& pseudo_sample() const { return ps_; }

 private:
  PseudoSample ps_;
  std::vector<double> maxima_;
};

}  // namespace detail

inline Copula make_empirical_copula(PseudoSample ps) {
  return Copula(std::make_shared<detail::EmpiricalCopulaModel>(std::move(ps)));
}

/// Draws n pairs from c: u uniform, then v = conditional_quantile(c, u, p) for uniform p.
inline PseudoSample simulate_copula(const Copula& c, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PseudoSample out;
  out.u.reserve(n);
  out.v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double p = rng.uniform();
    out.u.push_back(u);
    out.v.push_back(conditional_quantile(c, u, p));
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Break-point detection on data

inline constexpr std::size_t kRecommendedSampleSize = 50;
inline constexpr std::size_t kMinSegmentSize = 20;

struct DetectionParams {
  int grid_n = 512;
  /// Tolerance band is tol_scale / sqrt(n).
  double tol_scale = 1.0;
  int persistence = 5;
};

struct BreakpointDetection {
  CrossingReport report;
  std::vector<double> gluing_points;  // in u-space
  std::vector<double> break_points;   // in x-space
  double tolerance = 0.0;
  bool mixed_dependence = false;
  bool small_sample = false;
};

inline BreakpointDetection empirical_breakpoints(const Sample& s, const DetectionParams& params = {}) {
  BreakpointDetection out;
  out.small_sample = s.size() < kRecommendedSampleSize;
  out.tolerance = params.tol_scale / std::sqrt(static_cast<double>(s.size()));
  const Copula empirical = make_empirical_copula(pseudo_observations(s));
  const auto delta = [&](double t) { return empirical.model().diagonal(t); };
  out.report = diagonal_crossings(delta, {params.grid_n, out.tolerance, params.persistence});
  out.mixed_dependence = pqd_nqd_prescreen(delta, params.grid_n, out.tolerance);
  const MarginalModel mx = empirical_marginal(s.xs());
  for (const auto& crossing : out.report.crossings) {
    out.gluing_points.push_back(crossing.t);
    out.break_points.push_back(breakpoint_from_gluing_point(crossing.t, mx));
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Per-segment parametric fits

struct CandidateFit {
  Family family;
  std::vector<double> parameters;
  double rho_model = 0.0;
  double gof_distance = 0.0;
  bool skipped = false;
  std::string note;
};

struct FitResult {
  Family family = Family::product;
  std::vector<double> parameters;
  double rho_hat = 0.0;
  double gof_distance = 0.0;
  Interval segment;
  std::size_t n = 0;
  std::vector<CandidateFit> candidates;

  Copula copula() const { return make_family(family, parameters); }
  const CandidateFit* candidate(Family f) const {
    for (const auto& c : candidates)
      if (c.family == f) return &c;
    return nullptr;
  }
};

inline std::vector<Family> default_fit_families() {
  return {Family::product, Family::frechet_upper, Family::frechet_lower, Family::clayton,
          Family::frank,   Family::gumbel,        Family::fgm,           Family::plackett};
}

inline constexpr int kGofGrid = 32;

/// Mean squared difference between the empirical copula of ps and c on a 32 x 32 grid.
inline double gof_distance(const PseudoSample& ps, const Copula& c) {
  std::vector<double> grid(kGofGrid);
  for (int i = 0; i < kGofGrid; ++i) grid[i] = static_cast<double>(i + 1) / (kGofGrid + 1);
  std::vector<double> empirical(kGofGrid * kGofGrid), fitted(kGofGrid * kGofGrid);
  detail::EmpiricalCopulaModel(ps).value_grid(grid, grid, empirical);
  c.model().value_grid(grid, grid, fitted);
  double sum = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) sum += (empirical[i] - fitted[i]) * (empirical[i] - fitted[i]);
  return sum / static_cast<double>(empirical.size());
}

namespace detail {

// Parameter range searched when inverting rho; `log_scale` bisects on log(theta).
struct ParameterRange {
  double lo;
  double hi;
  bool log_scale = false;
};

inline std::optional<ParameterRange> parameter_range(Family f, double rho_hat) {
  switch (f) {
    case Family::clayton: return ParameterRange{1e-6, 100.0};
    case Family::gumbel: return ParameterRange{1.0, 100.0};
    case Family::fgm: return ParameterRange{-1.0, 1.0};
    case Family::frank:
      if (rho_hat == 0.0) return std::nullopt;
      return rho_hat > 0 ? ParameterRange{1e-6, 200.0} : ParameterRange{-200.0, -1e-6};
    case Family::plackett:
      if (rho_hat == 0.0) return std::nullopt;
      return rho_hat > 0 ? ParameterRange{1e-6, 14.0, true} : ParameterRange{-14.0, -1e-6, true};
    default: return std::nullopt;
  }
}

inline double family_rho(Family f, double theta) {
  const double params[] = {theta};
  return spearman_rho(make_family(f, params), kSmoothQuadratureNodes);
}

// Moment matching: the parameter whose Spearman rho equals rho_hat, by bisection on the
// family's (increasing) rho(theta). nullopt when rho_hat is not attainable in the range.
inline std::optional<double> invert_rho(Family f, double rho_hat) {
  const auto range = parameter_range(f, rho_hat);
  if (!range) return std::nullopt;
  auto theta_of = [&](double s) { return range->log_scale ? std::exp(s) : s; };
  double lo = range->lo, hi = range->hi;
  const double rho_lo = family_rho(f, theta_of(lo)), rho_hi = family_rho(f, theta_of(hi));
  if (rho_hat < rho_lo || rho_hat > rho_hi) return std::nullopt;
  for (int i = 0; i < 100 && hi - lo > 1e-10 * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double rho = family_rho(f, theta_of(mid));
    if (std::abs(rho - rho_hat) < 1e-9) return theta_of(mid);
    if (rho < rho_hat)
      lo = mid;
    else
      hi = mid;
  }
  return theta_of(0.5 * (lo + hi));
}

}  // namespace detail

/// Fits each candidate family to a segment by inverting Spearman's rho and keeps the one
/// closest to the empirical copula.
inline FitResult fit_segment(const PseudoSample& ps, std::span<const Family> families,
                             Interval segment = {}) {
  if (ps.size() < kMinSegmentSize)
    throw DataError("segment too small: " + std::to_string(ps.size()) + " points, need at least " +
                    std::to_string(kMinSegmentSize));
  if (families.empty()) throw std::invalid_argument("fit_segment: no candidate families");

  FitResult result;
  result.rho_hat = sample_spearman(ps);
  result.segment = segment;
  result.n = ps.size();
  const CandidateFit* best = nullptr;
  for (Family f : families) {
    CandidateFit cand{f, {}, 0.0, 0.0, false, {}};
    const int arity = family_arity(f);
    if (arity < 0 || f == Family::example1) {
      cand.skipped = true;
      cand.note = "not a fittable family";
    } else if (arity == 1) {
      const auto theta = detail::invert_rho(f, result.rho_hat);
      if (!theta) {
        cand.skipped = true;
        cand.note = "rho outside attainable range";
      } else {
        cand.parameters = {*theta};
      }
    }
    if (!cand.skipped) {
      const Copula c = make_family(f, cand.parameters);
      cand.rho_model = spearman_rho(c);
      cand.gof_distance = gof_distance(ps, c);
    }
    result.candidates.push_back(std::move(cand));
  }
  for (const auto& cand : result.candidates)
    if (!cand.skipped && (!best || cand.gof_distance < best->gof_distance)) best = &cand;
  if (!best) throw DataError("no candidate family could be fitted to the segment");
  result.family = best->family;
  result.parameters = best->parameters;
  result.gof_distance = best->gof_distance;
  return result;
}

struct PiecewiseFit {
  PiecewiseRegressionModel model;
  std::vector<FitResult> segments;
  std::optional<BreakpointDetection> detection;  // set when break-points were detected
};

/// Splits the sample at the given (or detected) break-points and fits every segment.
/// u is re-ranked within each segment; v keeps the global ranks of Y.
inline PiecewiseFit fit_piecewise(const Sample& s,
                                  std::optional<std::vector<double>> break_points = std::nullopt,
                                  std::span<const Family> families = {},
                                  const DetectionParams& params = {}) {
  if (s.size() < kRecommendedSampleSize)
    throw DataError("fit_piecewise needs at least " + std::to_string(kRecommendedSampleSize) +
                    " observations");
  std::vector<Family> fallback;
  if (families.empty()) {
    fallback = default_fit_families();
    families = fallback;
  }
  std::optional<BreakpointDetection> detection;
  if (!break_points) {
    detection = empirical_breakpoints(s, params);
    break_points = detection->break_points;
  }
  const std::vector<double>& bps = *break_points;
  const auto xs = s.xs(), ys = s.ys();
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (!(bps[i] > *xmin && bps[i] < *xmax))
      throw DataError("break-point " + std::to_string(bps[i]) + " outside the range of x");
    if (i > 0 && !(bps[i] > bps[i - 1])) throw DataError("break-points must be strictly increasing");
  }

  const auto v_global = scaled_ranks(ys);
  std::vector<std::vector<std::size_t>> members(bps.size() + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto seg = static_cast<std::size_t>(std::lower_bound(bps.begin(), bps.end(), xs[i]) - bps.begin());
    members[seg].push_back(i);
  }

  std::vector<FitResult> fits;
  std::vector<Copula> copulas;
  for (std::size_t seg = 0; seg < members.size(); ++seg) {
    std::vector<double> seg_x;
    PseudoSample ps;
    for (std::size_t idx : members[seg]) {
      seg_x.push_back(xs[idx]);
      ps.v.push_back(v_global[idx]);
    }
    ps.u = scaled_ranks(seg_x);
    const Interval interval{seg == 0 ? *xmin : bps[seg - 1], seg == bps.size() ? *xmax : bps[seg]};
    if (ps.size() < kMinSegmentSize)
      throw DataError("segment " + std::to_string(seg + 1) + " too small: " + std::to_string(ps.size()) +
                      " points, need at least " + std::to_string(kMinSegmentSize));
    fits.push_back(fit_segment(ps, families, interval));
    copulas.push_back(fits.back().copula());
  }
  PiecewiseRegressionModel model(bps, std::move(copulas), empirical_marginal(xs), empirical_marginal(ys));
  return {std::move(model), std::move(fits), std::move(detection)};
}

}  // namespace pwcop
