// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "ristrace/geometry.hpp"

namespace ristrace {

/// Receiver sample lattice in a horizontal plane. Points are
/// (x0 + i*step, y0 + j*step, z) for i, j starting at 0 and staying within
/// the ranges (1e-9 relative slack on the division).
struct GridSpec {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  double z = 0.0;
  double step = 0.01;

  void validate() const {
    if (!(step > 0.0))
      throw std::invalid_argument("grid step must be positive");
    if (!(x1 > x0) || !(y1 > y0))
      throw std::invalid_argument("grid ranges must be non-degenerate");
  }

  std::size_t count_x() const { return static_cast<std::size_t>(std::floor((x1 - x0) / step + 1e-9)) + 1; }
  std::size_t count_y() const { return static_cast<std::size_t>(std::floor((y1 - y0) / step + 1e-9)) + 1; }
  std::size_t size() const { return count_x() * count_y(); }

  double x(std::size_t i) const { return x0 + static_cast<double>(i) * step; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * step; }

  /// Row-major: index = j * count_x + i.
  Vec3 point(std::size_t index) const {
    const std::size_t nx = count_x();
    return {x(index % nx), y(index / nx), z};
  }

  friend bool operator==(const GridSpec &, const GridSpec &) = default;
};

} // namespace ristrace
