// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossbar/frames.hpp"

namespace crossbar {

/// Points in [-0.5, 0.5]^3 labeled by the sign of their first coordinate.
struct CubeDataset {
  Eigen::MatrixXd points;  // m x 3
  Eigen::VectorXd labels;  // +-1
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// Exactly m/2 points per class, shuffled, split evenly into train and test.
/// Points with |x1| < 1e-9 are never produced. Throws on odd or zero m.
CubeDataset gen_cube(std::size_t m, std::uint64_t seed);

/// [x y z t] rows of the training set, t the label.
Eigen::MatrixXd training_block(const CubeDataset& ds);

/// Horizontal concatenation of `copies` identical blocks.
Eigen::MatrixXd replicate_design(const Eigen::MatrixXd& block, std::size_t copies);

/// Synthetic surveillance clip: static textured background modulated by a
/// few smooth illumination patterns, plus a bright square bouncing around
/// the frame.
struct SyntheticVideo {
  FrameStack frames;
  std::vector<std::vector<bool>> masks;  // per frame, true on square pixels
};

struct VideoSpec {
  std::size_t frames = 64;
  std::size_t height = 24;
  std::size_t width = 32;
  std::size_t square = 6;
  std::size_t illumination_modes = 5;  // pattern p flickers at p + 1 cycles per clip
  double illumination_amplitude = 0.1;
  double square_contrast = 0.35;
  double speed = 3.0;  // pixels per frame
};

SyntheticVideo moving_square_video(const VideoSpec& spec, std::uint64_t seed);

enum class FactorDistribution : std::uint8_t { Gaussian, Rademacher };

/// Random m x n matrix with prescribed singular values. The singular
/// vectors are the orthonormalized columns of a random Gaussian or +-1
/// matrix. `sigma` must have at most min(m, n) entries.
Eigen::MatrixXd matrix_with_spectrum(std::size_t m, std::size_t n, const Eigen::VectorXd& sigma,
                                     std::uint64_t seed,
                                     FactorDistribution factors = FactorDistribution::Gaussian);

/// Spectrum with k geometrically decaying leading values (ratio
/// `head_decay`) and a slowly decaying tail, normalized so the optimal
/// rank-k relative error ||A - A_k||_F / ||A||_F equals `target_error`.
Eigen::VectorXd genetics_like_spectrum(std::size_t n, std::size_t k, double target_error,
                                       double head_decay = 0.85);

/// Stand-in for a genotype matrix: bounded, evenly spread entries (+-1
/// singular-vector factors, like SNP codes) with a genetics-like spectrum.
Eigen::MatrixXd genetics_like_matrix(std::size_t m, std::size_t n, std::size_t k, double target_error,
                                     std::uint64_t seed);

/// Optimal rank-k relative Frobenius error for a given spectrum.
double tail_relative_error(const Eigen::VectorXd& sigma, std::size_t k);

}  // namespace crossbar
