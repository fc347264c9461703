// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "crossbar/cost_model.hpp"

namespace crossbar {

/// ConstantStep device statistics. Weights are dimensionless and bounded by
/// [-w_max, w_max].
struct DeviceParams {
  double dw_min = 0.001;   // mean conductance change per pulse coincidence
  double asym_std = 0.01;  // up-versus-down step asymmetry, relative
  double d2d_std = 0.3;    // crosspoint-to-crosspoint step variation, relative
  double p2p_std = 0.3;    // pulse-to-pulse step variation, relative
  double w_max = 1.0;
  double write_noise_std = 0.0;  // programming noise of a matrix load, in units of w_max

  void validate() const;
};

/// Periphery model: DAC/ADC resolution, output noise and output bound.
struct IOParams {
  std::optional<int> input_bits = 7;  // nullopt: infinite resolution
  std::optional<int> adc_bits = 9;
  double sigma_out = 0.10;         // output noise std, fraction of w_max
  double out_bound_factor = 20.0;  // output clip, multiple of w_max
  bool noise_management = true;    // divide inputs by max|x| before the DAC
  bool update_management = true;   // balance row/column pulse probabilities

  /// Exact arithmetic: no noise, no quantization, unbounded outputs.
  static IOParams ideal();
  bool is_ideal() const;
  void validate() const;
};

enum class UpdateMode : std::uint8_t { Stochastic, Ideal };

struct PulseConfig {
  int bl = 31;  // pulse slots per update
  UpdateMode mode = UpdateMode::Stochastic;

  void validate() const;
};

/// Opaque reference to a vector held in a tile's digital cache.
struct VectorHandle {
  std::uint64_t tile_id = 0;
  std::uint64_t epoch = 0;
  std::size_t slot = 0;
};

/// Behavioral model of one crossbar tile holding a signed weight matrix.
///
/// MV products follow y = f_adc(W f_dac(x) + sigma_out w_max xi) with the
/// noise-management scale undone after the ADC. Outer-product updates are
/// realized with stochastic pulse trains whose coincidences move each
/// weight by its own device step, so that E[dW] = u v^T below saturation.
/// All randomness comes from the tile's own engine, seeded at construction.
///
/// A tile must not be shared between threads without external locking.
class AnalogTile {
 public:
  AnalogTile(std::size_t rows, std::size_t cols, DeviceParams device, IOParams io, std::uint64_t seed);

  std::size_t rows() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(weights_.cols()); }
  const DeviceParams& device() const { return device_; }
  const IOParams& io() const { return io_; }

  /// Hidden state, for inspection by tests and oracles.
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::MatrixXd& step_up() const { return step_up_; }
  const Eigen::MatrixXd& step_down() const { return step_down_; }

  /// Number of pulse probabilities clamped at one so far.
  std::uint64_t saturation_count() const { return saturations_; }

  /// Primitives executed by this tile are recorded on `ledger` until
  /// detached. The ledger must outlive the attachment.
  void attach_ledger(CostLedger& ledger) { ledger_ = &ledger; }
  void detach_ledger() { ledger_ = nullptr; }
  CostLedger* ledger() const { return ledger_; }

  /// Sets every weight to zero. Not costed; callers that need an explicit
  /// initialization record a matrix write themselves.
  void reset();

  /// Programs the matrix into the array. Entries beyond w_max are rejected.
  void load(const Eigen::MatrixXd& a);

  /// Analog MV products. With max_halvings > 0, a product whose analog
  /// output reaches the bound is repeated with the DAC input range halved,
  /// at most max_halvings times (bound management); every attempt is
  /// costed as one MV.
  Eigen::VectorXd mv(const Eigen::VectorXd& x, int max_halvings = 0);
  Eigen::VectorXd mv_transpose(const Eigen::VectorXd& x, int max_halvings = 0);

  /// In-memory rank-one update W += u v^T.
  void update(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const PulseConfig& pulses);

  /// Reads the array back column by column with one-hot MV products.
  Eigen::MatrixXd read();

  VectorHandle write_vector(const Eigen::VectorXd& x);
  Eigen::VectorXd read_vector(const VectorHandle& handle);

  /// Tile-side view of a cached vector (no transfer, not costed).
  const Eigen::VectorXd& cached(const VectorHandle& handle) const;
  /// Leaves an MV result in the cache for a later read_vector (not costed).
  VectorHandle stage(const Eigen::VectorXd& x);

 private:
  Eigen::VectorXd analog_product(const Eigen::VectorXd& x, bool transposed, bool manage_noise,
                                 double input_scale = 1.0, bool* saturated = nullptr);
  Eigen::VectorXd managed_product(const Eigen::VectorXd& x, bool transposed, int max_halvings);
  void stochastic_update(const Eigen::VectorXd& u, const Eigen::VectorXd& v, int bl);
  void draw_pulse_trains(const Eigen::VectorXd& probabilities, int bl, std::vector<std::uint64_t>& bits);
  void record(Primitive p);
  void invalidate_cache();
  void check_handle(const VectorHandle& handle) const;

  DeviceParams device_;
  IOParams io_;
  Eigen::MatrixXd weights_;
  Eigen::MatrixXd step_up_;
  Eigen::MatrixXd step_down_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t saturations_ = 0;
  CostLedger* ledger_ = nullptr;

  std::uint64_t id_;
  std::uint64_t epoch_ = 0;
  std::vector<Eigen::VectorXd> cache_;
};

/// Max-abs scaling of a matrix into the weight range of a tile.
struct TileScaling {
  Eigen::MatrixXd scaled;
  double scale = 1.0;  // scaled = scale * original
};

/// Scales `a` so that max|entry| = headroom * w_max. When `out_bound` is
/// given, the scale is further reduced so that no row or column absolute
/// sum exceeds it, i.e. neither MV direction can saturate for inputs in
/// [-1, 1]. A zero matrix is returned unscaled.
TileScaling scale_for_tile(const Eigen::MatrixXd& a, double w_max, double headroom = 0.5,
                           std::optional<double> out_bound = std::nullopt);

}  // namespace crossbar
