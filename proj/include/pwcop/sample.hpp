#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwcop/numerics.hpp"

namespace pwcop {

struct Observation {
  double x;
  double y;
};

/// Paired observations; at least two, all finite.
class Sample {
 public:
  explicit Sample(std::vector<Observation> obs) : Sample(std::move(obs), 2) {}

  /// Simulator output, where a single draw is allowed.
  static Sample simulated(std::vector<Observation> obs) { return Sample(std::move(obs), 1); }

  std::size_t size() const { return obs_.size(); }
  std::span<const Observation> observations() const { return obs_; }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }

  std::vector<double> xs() const {
    std::vector<double> out;
    out.reserve(obs_.size());
    for (const auto& o : obs_) out.push_back(o.x);
    return out;
  }
  std::vector<double> ys() const {
    std::vector<double> out;
    out.reserve(obs_.size());
    for (const auto& o : obs_) out.push_back(o.y);
    return out;
  }

 private:
  Sample(std::vector<Observation> obs, std::size_t min_size) : obs_(std::move(obs)) {
    if (obs_.size() < min_size)
      throw DataError("sample needs at least " + std::to_string(min_size) + " observations");
    for (const auto& o : obs_)
      if (!std::isfinite(o.x) || !std::isfinite(o.y)) throw DataError("sample contains non-finite values");
  }

  std::vector<Observation> obs_;
};

}  // namespace pwcop
