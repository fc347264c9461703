// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

namespace crossbar {

/// Mid-tread uniform quantizer with 2^bits - 1 levels placed symmetrically
/// about zero on [-bound, bound]. Inputs outside the range are clipped first;
/// ties round away from zero. `bits == std::nullopt` means infinite
/// resolution (only the clip is applied).
double quantize_symmetric(double x, std::optional<int> bits, double bound);

/// Distance between adjacent levels of the quantizer above, or 0 for
/// infinite resolution.
double quantization_step(std::optional<int> bits, double bound);

}  // namespace crossbar
