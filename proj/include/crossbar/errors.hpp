// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossbar {

/// Operation attempted on an object whose state no longer permits it
/// (e.g. a cache handle invalidated by a reset).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A least-squares or orthogonalization step met a rank-deficient system.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, std::size_t effective_rank)
      : std::runtime_error(what + " (effective rank " + std::to_string(effective_rank) + ")"),
        effective_rank_(effective_rank) {}

  std::size_t effective_rank() const noexcept { return effective_rank_; }

 private:
  std::size_t effective_rank_;
};

}  // namespace crossbar
