// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/analog_tile.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crossbar/errors.hpp"
#include "crossbar/quantize.hpp"

namespace crossbar {

namespace {

std::atomic<std::uint64_t> next_tile_id{1};

// Below this fraction of dw_min a sampled device step is floored.
constexpr double kMinStepFraction = 1e-3;

// Slack, in p2p standard deviations, for deciding that a burst of pulses
// cannot reach the weight bound.
constexpr double kBoundSlackSigmas = 6.0;

void require_finite(const Eigen::VectorXd& x, const char* what) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

void DeviceParams::validate() const {
  if (!(dw_min > 0.0) || !(w_max > 0.0)) {
    throw std::invalid_argument("dw_min and w_max must be positive");
  }
  if (asym_std < 0.0 || d2d_std < 0.0 || p2p_std < 0.0 || write_noise_std < 0.0) {
    throw std::invalid_argument("device standard deviations must be nonnegative");
  }
}

IOParams IOParams::ideal() {
  IOParams io;
  io.input_bits = std::nullopt;
  io.adc_bits = std::nullopt;
  io.sigma_out = 0.0;
  io.out_bound_factor = std::numeric_limits<double>::infinity();
  return io;
}

bool IOParams::is_ideal() const {
  return !input_bits && !adc_bits && sigma_out == 0.0 && std::isinf(out_bound_factor);
}

void IOParams::validate() const {
  if ((input_bits && *input_bits < 1) || (adc_bits && *adc_bits < 1)) {
    throw std::invalid_argument("converter resolutions must be at least one bit");
  }
  if (!(sigma_out >= 0.0)) {
    throw std::invalid_argument("sigma_out must be nonnegative");
  }
  if (!(out_bound_factor > 0.0)) {
    throw std::invalid_argument("out_bound_factor must be positive");
  }
  if (adc_bits && std::isinf(out_bound_factor)) {
    throw std::invalid_argument("a finite ADC resolution needs a finite output bound");
  }
}

void PulseConfig::validate() const {
  if (bl < 1) {
    throw std::invalid_argument("pulse train length must be at least one");
  }
}

AnalogTile::AnalogTile(std::size_t rows, std::size_t cols, DeviceParams device, IOParams io,
                       std::uint64_t seed)
    : device_(device), io_(io), rng_(seed), id_(next_tile_id.fetch_add(1)) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("tile dimensions must be nonzero");
  }
  device_.validate();
  io_.validate();

  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  weights_ = Eigen::MatrixXd::Zero(r, c);
  step_up_.resize(r, c);
  step_down_.resize(r, c);

  const double floor = kMinStepFraction * device_.dw_min;
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      double base = device_.dw_min;
      double asym = 0.0;
      if (device_.d2d_std > 0.0) {
        base *= 1.0 + device_.d2d_std * normal_(rng_);
      }
      if (device_.asym_std > 0.0) {
        asym = device_.asym_std * normal_(rng_);
      }
      step_up_(i, j) = std::max(base * (1.0 + asym), floor);
      step_down_(i, j) = std::max(base * (1.0 - asym), floor);
    }
  }
}

void AnalogTile::record(Primitive p) {
  if (ledger_ != nullptr) {
    ledger_->record(p);
  }
}

void AnalogTile::invalidate_cache() {
  ++epoch_;
  cache_.clear();
}

void AnalogTile::reset() {
  weights_.setZero();
  invalidate_cache();
}

void AnalogTile::load(const Eigen::MatrixXd& a) {
  if (a.rows() != weights_.rows() || a.cols() != weights_.cols()) {
    throw std::invalid_argument("matrix dimensions do not match the tile");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("matrix entries must be finite");
  }
  if (a.size() > 0 && a.cwiseAbs().maxCoeff() > device_.w_max) {
    throw std::out_of_range("matrix entry exceeds w_max; scale the matrix before loading");
  }
  weights_ = a;
  if (device_.write_noise_std > 0.0) {
    const double sd = device_.write_noise_std * device_.w_max;
    for (Eigen::Index k = 0; k < weights_.size(); ++k) {
      weights_.data()[k] += sd * normal_(rng_);
    }
    weights_ = weights_.cwiseMax(-device_.w_max).cwiseMin(device_.w_max);
  }
  invalidate_cache();
  record(Primitive::MatrixWrite);
}

Eigen::VectorXd AnalogTile::analog_product(const Eigen::VectorXd& x, bool transposed, bool manage_noise,
                                           double input_scale, bool* saturated) {
  const Eigen::Index in_size = transposed ? weights_.rows() : weights_.cols();
  if (x.size() != in_size) {
    throw std::invalid_argument("input vector length does not match the tile");
  }
  require_finite(x, "MV input");

  double alpha = 1.0;
  if (manage_noise) {
    const double max_abs = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    alpha = max_abs > 0.0 ? max_abs : 1.0;
  }
  alpha /= input_scale;

  Eigen::VectorXd xq(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xq[j] = quantize_symmetric(x[j] / alpha, io_.input_bits, 1.0);
  }

  Eigen::VectorXd y = transposed ? Eigen::VectorXd(weights_.transpose() * xq) : Eigen::VectorXd(weights_ * xq);

  const double sd = io_.sigma_out * device_.w_max;
  const double bound = io_.out_bound_factor * device_.w_max;
  bool hit = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double analog = y[i];
    if (sd > 0.0) {
      analog += sd * normal_(rng_);
    }
    hit |= std::abs(analog) >= bound;
    y[i] = alpha * quantize_symmetric(analog, io_.adc_bits, bound);
  }
  if (saturated != nullptr) {
    *saturated = hit;
  }
  return y;
}

Eigen::VectorXd AnalogTile::managed_product(const Eigen::VectorXd& x, bool transposed, int max_halvings) {
  if (max_halvings < 0) {
    throw std::invalid_argument("max_halvings must be nonnegative");
  }
  double scale = 1.0;
  for (int attempt = 0;; ++attempt) {
    bool saturated = false;
    Eigen::VectorXd y = analog_product(x, transposed, io_.noise_management, scale, &saturated);
    record(Primitive::Mv);
    if (!saturated || attempt == max_halvings) {
      return y;
    }
    scale *= 0.5;
  }
}

Eigen::VectorXd AnalogTile::mv(const Eigen::VectorXd& x, int max_halvings) {
  return managed_product(x, false, max_halvings);
}

Eigen::VectorXd AnalogTile::mv_transpose(const Eigen::VectorXd& x, int max_halvings) {
  return managed_product(x, true, max_halvings);
}

void AnalogTile::update(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const PulseConfig& pulses) {
  pulses.validate();
  if (u.size() != weights_.rows() || v.size() != weights_.cols()) {
    throw std::invalid_argument("update vectors do not match the tile");
  }
  require_finite(u, "update row vector");
  require_finite(v, "update column vector");

  if (pulses.mode == UpdateMode::Ideal) {
    weights_.noalias() += u * v.transpose();
    weights_ = weights_.cwiseMax(-device_.w_max).cwiseMin(device_.w_max);
  } else {
    stochastic_update(u, v, pulses.bl);
  }
  record(Primitive::Op);
}

void AnalogTile::draw_pulse_trains(const Eigen::VectorXd& probabilities, int bl,
                                   std::vector<std::uint64_t>& bits) {
  const std::size_t words = (static_cast<std::size_t>(bl) + 63) / 64;
  bits.assign(static_cast<std::size_t>(probabilities.size()) * words, 0);
  for (Eigen::Index line = 0; line < probabilities.size(); ++line) {
    const double p = probabilities[line];
    if (p <= 0.0) {
      continue;
    }
    std::uint64_t* out = bits.data() + static_cast<std::size_t>(line) * words;
    for (int t = 0; t < bl; ++t) {
      if (p >= 1.0 || uniform_(rng_) < p) {
        out[t / 64] |= std::uint64_t{1} << (t % 64);
      }
    }
  }
}

void AnalogTile::stochastic_update(const Eigen::VectorXd& u, const Eigen::VectorXd& v, int bl) {
  const double a_u = u.cwiseAbs().maxCoeff();
  const double a_v = v.cwiseAbs().maxCoeff();
  if (a_u == 0.0 || a_v == 0.0) {
    return;
  }

  double row_gain = 1.0;
  double col_gain = 1.0;
  if (io_.update_management) {
    row_gain = std::sqrt(a_v / a_u);
    col_gain = 1.0 / row_gain;
  }

  // Coincidence probability per slot is p_i p_j = |u_i v_j| / (bl dw_min),
  // so bl coincidences of mean size dw_min add u_i v_j on average.
  const double c = 1.0 / std::sqrt(static_cast<double>(bl) * device_.dw_min);
  auto probabilities = [&](const Eigen::VectorXd& x, double gain) {
    Eigen::VectorXd p = x.cwiseAbs() * (gain * c);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (p[k] > 1.0) {
        p[k] = 1.0;
        ++saturations_;
      }
    }
    return p;
  };
  const Eigen::VectorXd p_row = probabilities(u, row_gain);
  const Eigen::VectorXd p_col = probabilities(v, col_gain);

  std::vector<std::uint64_t> row_bits;
  std::vector<std::uint64_t> col_bits;
  draw_pulse_trains(p_row, bl, row_bits);
  draw_pulse_trains(p_col, bl, col_bits);

  const std::size_t words = (static_cast<std::size_t>(bl) + 63) / 64;
  const double w_max = device_.w_max;
  const double p2p = device_.p2p_std;

  for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
    if (p_col[j] <= 0.0) {
      continue;
    }
    const std::uint64_t* cb = col_bits.data() + static_cast<std::size_t>(j) * words;
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
      if (p_row[i] <= 0.0) {
        continue;
      }
      const std::uint64_t* rb = row_bits.data() + static_cast<std::size_t>(i) * words;
      int coincidences = 0;
      for (std::size_t w = 0; w < words; ++w) {
        coincidences += std::popcount(rb[w] & cb[w]);
      }
      if (coincidences == 0) {
        continue;
      }

      const bool up = (u[i] > 0.0) == (v[j] > 0.0);
      const double sign = up ? 1.0 : -1.0;
      const double step = up ? step_up_(i, j) : step_down_(i, j);
      double& w = weights_(i, j);
      const double n = coincidences;

      if (std::abs(w) + step * n * (1.0 + kBoundSlackSigmas * p2p) < w_max) {
        // Far from the bound: the sum of n pulse steps has an exact closed form.
        double total = n;
        if (p2p > 0.0) {
          total += p2p * std::sqrt(n) * normal_(rng_);
        }
        w += sign * step * total;
      } else {
        for (int k = 0; k < coincidences; ++k) {
          double pulse = 1.0;
          if (p2p > 0.0) {
            pulse += p2p * normal_(rng_);
          }
          w = std::clamp(w + sign * step * pulse, -w_max, w_max);
        }
      }
    }
  }
}

Eigen::MatrixXd AnalogTile::read() {
  Eigen::MatrixXd out(weights_.rows(), weights_.cols());
  Eigen::VectorXd one_hot = Eigen::VectorXd::Zero(weights_.cols());
  for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
    one_hot[j] = 1.0;
    out.col(j) = analog_product(one_hot, false, false);
    one_hot[j] = 0.0;
  }
  record(Primitive::MatrixRead);
  return out;
}

VectorHandle AnalogTile::write_vector(const Eigen::VectorXd& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("cannot cache an empty vector");
  }
  require_finite(x, "cached vector");
  cache_.push_back(x);
  record(Primitive::VectorWrite);
  return VectorHandle{id_, epoch_, cache_.size() - 1};
}

void AnalogTile::check_handle(const VectorHandle& handle) const {
  if (handle.tile_id != id_ || handle.epoch != epoch_ || handle.slot >= cache_.size()) {
    throw InvalidState("stale or foreign vector handle");
  }
}

Eigen::VectorXd AnalogTile::read_vector(const VectorHandle& handle) {
  check_handle(handle);
  record(Primitive::VectorRead);
  return cache_[handle.slot];
}

const Eigen::VectorXd& AnalogTile::cached(const VectorHandle& handle) const {
  check_handle(handle);
  return cache_[handle.slot];
}

VectorHandle AnalogTile::stage(const Eigen::VectorXd& x) {
  if (x.size() == 0) {
    throw std::invalid_argument("cannot cache an empty vector");
  }
  cache_.push_back(x);
  return VectorHandle{id_, epoch_, cache_.size() - 1};
}

TileScaling scale_for_tile(const Eigen::MatrixXd& a, double w_max, double headroom,
                           std::optional<double> out_bound) {
  if (!(w_max > 0.0) || !(headroom > 0.0) || headroom > 1.0) {
    throw std::invalid_argument("scaling needs w_max > 0 and headroom in (0, 1]");
  }
  const double max_abs = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  if (max_abs == 0.0) {
    return {a, 1.0};
  }
  double scale = headroom * w_max / max_abs;
  if (out_bound) {
    const double row_sum = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double col_sum = a.cwiseAbs().colwise().sum().maxCoeff();
    scale = std::min(scale, *out_bound / std::max(row_sum, col_sum));
  }
  return {scale * a, scale};
}

}  // namespace crossbar
