#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rvp/errors.hpp"

namespace rvp {

/// Geometric radial grid r_i = r_min g^i, i = 0..n-1, with r_{n-1} = r_max.
class RadialGrid {
 public:
  RadialGrid() : RadialGrid(1e-3, 1e3, 2048) {}

  RadialGrid(double r_min, double r_max, std::size_t nodes) {
    if (!(r_min > 0.0) || !(r_max > r_min) || nodes < 3)
      throw InvalidArgument("radial grid needs 0 < r_min < r_max and at least 3 nodes");
    log_step_ = std::log(r_max / r_min) / static_cast<double>(nodes - 1);
    r_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) r_[i] = r_min * std::exp(log_step_ * static_cast<double>(i));
    r_.back() = r_max;
  }

  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  const std::vector<double>& radii() const noexcept { return r_; }
  double r_min() const noexcept { return r_.front(); }
  double r_max() const noexcept { return r_.back(); }
  /// Spacing in u = ln r.
  double log_step() const noexcept { return log_step_; }

  /// Index i with r_i <= r < r_{i+1}, clamped to [0, n-2].
  std::size_t interval(double r) const {
    if (r <= r_.front()) return 0;
    auto i = static_cast<std::ptrdiff_t>(std::floor(std::log(r / r_.front()) / log_step_));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(r_.size()) - 2);
    // guard against rounding at node values
    while (i > 0 && r < r_[i]) --i;
    while (i + 2 < static_cast<std::ptrdiff_t>(r_.size()) && r >= r_[i + 1]) ++i;
    return static_cast<std::size_t>(i);
  }

  /// Control volume of node i: 4 pi r_i^3 h_u, halved at both ends. The
  /// trapezoid rule in u of 4 pi r^3 rho then equals sum_i rho_i W_i.
  double control_volume(std::size_t i) const {
    const double end = (i == 0 || i + 1 == r_.size()) ? 0.5 : 1.0;
    return 4.0 * 3.141592653589793 * r_[i] * r_[i] * r_[i] * log_step_ * end;
  }

 private:
  std::vector<double> r_;
  double log_step_ = 0.0;
};

}  // namespace rvp
