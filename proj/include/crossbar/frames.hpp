// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <vector>

namespace crossbar {

/// Grayscale video with pixels in [0, 1]. Row i of `pixels` is frame i
/// vectorized in row-major order.
struct FrameStack {
  std::size_t height = 0;
  std::size_t width = 0;
  Eigen::MatrixXd pixels;  // frames x (height * width)

  std::size_t frame_count() const { return static_cast<std::size_t>(pixels.rows()); }
  Eigen::MatrixXd frame(std::size_t i) const;  // height x width
  void validate() const;
};

/// Row-major vectorization of a height x width image and its inverse.
Eigen::RowVectorXd vectorize_frame(const Eigen::MatrixXd& image);
Eigen::MatrixXd unvectorize_frame(const Eigen::RowVectorXd& row, std::size_t height, std::size_t width);

/// Reads a binary (P5) or ASCII (P2) PGM, scaled to [0, 1].
Eigen::MatrixXd read_pgm(const std::filesystem::path& path);
/// Writes an 8-bit P5 PGM; values are clipped to [0, 1].
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& image);

/// Every *.pgm in a directory, in file-name order.
FrameStack load_pgm_directory(const std::filesystem::path& dir);

/// Raw 8-bit frames: `stem.bin` holds frames*height*width bytes and
/// `stem.dims` holds "frames height width".
FrameStack load_raw_frames(const std::filesystem::path& bin_path);
void save_raw_frames(const std::filesystem::path& bin_path, const FrameStack& frames);

/// Directory of PGMs or a .bin file, by inspection of the path.
FrameStack load_frames(const std::filesystem::path& path);

}  // namespace crossbar
