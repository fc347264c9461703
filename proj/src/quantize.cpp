// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crossbar {

namespace {

// Number of nonzero levels on each side of zero.
double half_levels(int bits) {
  if (bits < 1) {
    throw std::invalid_argument("quantizer needs at least one bit");
  }
  return std::ldexp(1.0, bits - 1) - 1.0;
}

}  // namespace

double quantization_step(std::optional<int> bits, double bound) {
  if (!bits) {
    return 0.0;
  }
  const double levels = half_levels(*bits);
  if (levels == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return bound / levels;
}

double quantize_symmetric(double x, std::optional<int> bits, double bound) {
  const double clipped = std::clamp(x, -bound, bound);
  if (!bits) {
    return clipped;
  }
  const double levels = half_levels(*bits);
  if (levels == 0.0 || !std::isfinite(bound)) {
    return levels == 0.0 ? 0.0 : clipped;
  }
  const double step = bound / levels;
  // std::round breaks ties away from zero.
  const double index = std::round(clipped / step);
  return std::clamp(index, -levels, levels) * step;
}

}  // namespace crossbar
