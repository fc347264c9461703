// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "crossbar/analog_tile.hpp"

namespace crossbar {

enum class SketchDistribution : std::uint8_t { Gaussian, Rademacher };

struct SketchConfig {
  std::size_t ell = 64;
  SketchDistribution dist = SketchDistribution::Gaussian;
  PulseConfig pulses{};
  std::uint64_t seed = 1;
  /// Update vectors are s_j * update_scale; the read-back is divided by it.
  /// Chosen by the caller so that the sketch fits in [-w_max, w_max].
  double update_scale = 1.0;
  /// Charge the initial reset as a matrix write.
  bool initialize_array = false;

  void validate() const;
};

/// Yields the next row of a streamed matrix, or nullopt at the end.
using RowSource = std::function<std::optional<Eigen::VectorXd>()>;

RowSource rows_of(const Eigen::MatrixXd& a);

/// Draws sketch columns s_j in the order the streaming algorithm consumes
/// them; the same seed reproduces the same S.
class SketchColumnGenerator {
 public:
  SketchColumnGenerator(std::size_t ell, SketchDistribution dist, std::uint64_t seed);
  Eigen::VectorXd next();

 private:
  std::size_t ell_;
  SketchDistribution dist_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Explicit ell x m sketching matrix with the columns `sketch_stream` uses.
Eigen::MatrixXd sketch_matrix(std::size_t ell, std::size_t m, SketchDistribution dist, std::uint64_t seed);

struct SketchResult {
  Eigen::MatrixXd z;  // ell x n
  std::size_t rows_streamed = 0;
  std::uint64_t seed = 0;
};

/// Streams the rows of A through rank-one updates of a zeroed tile and
/// reads the sketch Z = S A back. The tile must be ell x n.
SketchResult sketch_stream(const RowSource& rows, const SketchConfig& cfg, AnalogTile& tile);

/// Sketch-and-solve least squares on the augmented matrix [A b].
Eigen::VectorXd sketched_olls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SketchConfig& cfg,
                              AnalogTile& tile);

/// Solves min ||Z_A x - z_b|| by column-pivoted QR.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Exact least-squares solution via QR.
Eigen::VectorXd exact_olls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Orthonormal basis of the column space (thin Householder QR).
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a);

struct DistortionStats {
  std::vector<double> per_trial;
  double median = 0.0;
  double q90 = 0.0;
  double max = 0.0;
};

/// Applies a sketch drawn for trial `t` to the given matrix.
using SketchApply = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, std::size_t trial)>;

/// Subspace-embedding distortion max_i |sigma_i(S U)^2 - 1| with U = orth(A),
/// one value per trial.
DistortionStats embedding_distortion(const Eigen::MatrixXd& a, const SketchApply& apply, std::size_t trials);

/// Gaussian sketch scaled by ell^{-1/2}; trial t uses seed + t.
SketchApply gaussian_sketch_apply(std::size_t ell, std::uint64_t seed);

struct PCAConfig {
  std::size_t k = 5;
  std::size_t ell = 15;
  std::size_t q = 2;
  std::uint64_t seed = 1;
  /// Headroom for the max-abs scaling applied before the matrix load.
  double headroom = 0.5;
  /// Also cap the scale so neither MV direction can reach the output bound.
  bool avoid_saturation = false;
  /// Bound management for the range-finder MV products (see AnalogTile::mv).
  int max_halvings = 8;
  bool keep_intermediates = false;

  void validate() const;
};

struct PCAResult {
  Eigen::MatrixXd u_k;      // m x k, orthonormal
  Eigen::VectorXd sigma_k;  // nonincreasing
  Eigen::MatrixXd v_k;      // n x k
  Eigen::MatrixXd q;        // kept when requested
  Eigen::MatrixXd b;
  bool rank_deficient = false;
  std::size_t k = 0;
  std::size_t ell = 0;
  std::size_t power = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;  // tile weights = scale * A
};

/// Hybrid randomized PCA: loads A onto the m x n tile, forms
/// Y = (A A^T)^q A R column by column with analog MV products, then
/// orthogonalizes and runs the small SVD digitally.
PCAResult randomized_pca(const Eigen::MatrixXd& a, const PCAConfig& cfg, AnalogTile& tile);

/// Same as above for a matrix that only lives on the tile (e.g. after
/// in-place updates). `scale` maps tile weights back to the data; B is formed
/// from a matrix read.
PCAResult randomized_pca_resident(AnalogTile& tile, const PCAConfig& cfg, double scale);

/// All-digital randomized PCA drawing the same R as the hybrid version.
PCAResult randomized_pca_digital(const Eigen::MatrixXd& a, const PCAConfig& cfg);

/// Gaussian test matrix R (n x ell) in the order the hybrid algorithm draws it.
Eigen::MatrixXd pca_test_matrix(std::size_t n, std::size_t ell, std::uint64_t seed);

struct LowRankUpdate {
  Eigen::MatrixXd c;  // m x p
  Eigen::MatrixXd d;  // n x p
};

/// A <- A + C D^T in place, one OP update per column pair. `scale` is the
/// tile's data-to-weight scale.
void low_rank_update(AnalogTile& tile, const LowRankUpdate& upd, const PulseConfig& pulses, double scale = 1.0);

struct TruncatedSVD {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

TruncatedSVD exact_truncated_svd(const Eigen::MatrixXd& a, std::size_t k);

/// (A - 1 mean^T) / sqrt(m): zero column sums.
Eigen::MatrixXd center_columns(const Eigen::MatrixXd& a);

/// ||A - U U^T A||_F / ||A||_F.
double projection_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& u);

/// Largest principal angle (radians) between the column spaces of two
/// orthonormal bases.
double max_principal_angle(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

}  // namespace crossbar
