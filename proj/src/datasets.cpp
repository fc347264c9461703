// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/datasets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "crossbar/rand_nla.hpp"

namespace crossbar {

CubeDataset gen_cube(std::size_t m, std::uint64_t seed) {
  if (m == 0 || m % 2 != 0) {
    throw std::invalid_argument("gen_cube: point count must be even and positive, got " + std::to_string(m));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  std::uniform_real_distribution<double> half(0.0, 0.5);

  CubeDataset ds;
  ds.points.resize(static_cast<Eigen::Index>(m), 3);
  ds.labels.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = i < m / 2 ? 1.0 : -1.0;
    double x1 = 0.0;
    do {
      x1 = half(rng);
    } while (x1 < 1e-9);
    const auto r = static_cast<Eigen::Index>(i);
    ds.points(r, 0) = sign * x1;
    ds.points(r, 1) = coord(rng);
    ds.points(r, 2) = coord(rng);
    ds.labels(r) = sign;
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd points = ds.points;
  Eigen::VectorXd labels = ds.labels;
  for (std::size_t i = 0; i < m; ++i) {
    ds.points.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(order[i]));
    ds.labels(static_cast<Eigen::Index>(i)) = labels(static_cast<Eigen::Index>(order[i]));
  }

  std::shuffle(order.begin(), order.end(), rng);
  ds.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m / 2));
  ds.test.assign(order.begin() + static_cast<std::ptrdiff_t>(m / 2), order.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
  return ds;
}

Eigen::MatrixXd training_block(const CubeDataset& ds) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(ds.train.size()), 4);
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(ds.train[i]);
    const auto dst = static_cast<Eigen::Index>(i);
    block.block(dst, 0, 1, 3) = ds.points.row(src);
    block(dst, 3) = ds.labels(src);
  }
  return block;
}

Eigen::MatrixXd replicate_design(const Eigen::MatrixXd& block, std::size_t copies) {
  if (copies == 0) {
    throw std::invalid_argument("replicate_design: need at least one copy");
  }
  return block.replicate(1, static_cast<Eigen::Index>(copies));
}

SyntheticVideo moving_square_video(const VideoSpec& spec, std::uint64_t seed) {
  if (spec.frames == 0 || spec.height == 0 || spec.width == 0) {
    throw std::invalid_argument("moving_square_video: empty video");
  }
  if (spec.square == 0 || spec.square >= std::min(spec.height, spec.width)) {
    throw std::invalid_argument("moving_square_video: square does not fit the frame");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto h = static_cast<Eigen::Index>(spec.height);
  const auto w = static_cast<Eigen::Index>(spec.width);
  const double pi = std::acos(-1.0);

  // Smooth texture: a few random low-frequency cosines.
  Eigen::MatrixXd background = Eigen::MatrixXd::Constant(h, w, 0.5);
  for (int t = 0; t < 6; ++t) {
    const double fy = 1.0 + 3.0 * unif(rng);
    const double fx = 1.0 + 3.0 * unif(rng);
    const double phase = 2.0 * pi * unif(rng);
    for (Eigen::Index r = 0; r < h; ++r) {
      for (Eigen::Index c = 0; c < w; ++c) {
        background(r, c) += 0.04 * std::cos(pi * (fy * static_cast<double>(r) / static_cast<double>(h) +
                                                  fx * static_cast<double>(c) / static_cast<double>(w)) +
                                            phase);
      }
    }
  }

  // Illumination: smooth, mutually orthogonal cosine patterns of equal
  // energy, each flickering at its own frequency.
  const std::array<std::pair<int, int>, 6> modes = {{{0, 1}, {1, 0}, {1, 1}, {0, 2}, {2, 0}, {2, 1}}};
  if (spec.illumination_modes > modes.size()) {
    throw std::invalid_argument("moving_square_video: at most 6 illumination modes");
  }
  std::vector<Eigen::MatrixXd> patterns;
  std::vector<std::vector<double>> amplitudes;
  for (std::size_t p = 0; p < spec.illumination_modes; ++p) {
    Eigen::MatrixXd pat(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
      for (Eigen::Index c = 0; c < w; ++c) {
        pat(r, c) = std::cos(pi * modes[p].first * (static_cast<double>(r) + 0.5) / static_cast<double>(h)) *
                    std::cos(pi * modes[p].second * (static_cast<double>(c) + 0.5) / static_cast<double>(w));
      }
    }
    pat *= std::sqrt(static_cast<double>(h * w)) / pat.norm();
    patterns.push_back(pat);
    const double freq = static_cast<double>(p + 1);
    const double phase = 2.0 * pi * unif(rng);
    const double strength = spec.illumination_amplitude;
    std::vector<double> amp(spec.frames);
    for (std::size_t f = 0; f < spec.frames; ++f) {
      amp[f] = strength * std::sin(2.0 * pi * freq * static_cast<double>(f) / static_cast<double>(spec.frames) + phase);
    }
    amplitudes.push_back(std::move(amp));
  }

  SyntheticVideo video;
  video.frames.height = spec.height;
  video.frames.width = spec.width;
  video.frames.pixels.resize(static_cast<Eigen::Index>(spec.frames), h * w);
  video.masks.assign(spec.frames, std::vector<bool>(spec.height * spec.width, false));

  const double span_y = static_cast<double>(spec.height - spec.square);
  const double span_x = static_cast<double>(spec.width - spec.square);
  auto bounce = [](double pos, double span) {
    const double period = 2.0 * span;
    double t = std::fmod(pos, period);
    if (t < 0.0) {
      t += period;
    }
    return t <= span ? t : period - t;
  };
  const double y0 = span_y * unif(rng);
  const double x0 = span_x * unif(rng);
  const double vy = spec.speed * (0.6 + 0.2 * unif(rng));
  const double vx = spec.speed * (0.8 + 0.2 * unif(rng));
  for (std::size_t f = 0; f < spec.frames; ++f) {
    Eigen::MatrixXd img = background;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      img += amplitudes[p][f] * patterns[p];
    }
    // Square bounces off the frame edges.
    const auto top = static_cast<Eigen::Index>(std::lround(bounce(y0 + vy * static_cast<double>(f), span_y)));
    const auto left = static_cast<Eigen::Index>(std::lround(bounce(x0 + vx * static_cast<double>(f), span_x)));
    const auto s = static_cast<Eigen::Index>(spec.square);
    img.block(top, left, s, s).array() += spec.square_contrast;
    for (Eigen::Index r = top; r < top + s; ++r) {
      for (Eigen::Index c = left; c < left + s; ++c) {
        video.masks[f][static_cast<std::size_t>(r * w + c)] = true;
      }
    }
    video.frames.pixels.row(static_cast<Eigen::Index>(f)) = vectorize_frame(img);
  }
  // One affine map for the whole clip keeps the low-rank structure intact.
  auto& px = video.frames.pixels;
  const double lo = px.minCoeff();
  const double hi = px.maxCoeff();
  px = (px.array() - lo) / (hi - lo);
  return video;
}

Eigen::MatrixXd matrix_with_spectrum(std::size_t m, std::size_t n, const Eigen::VectorXd& sigma,
                                     std::uint64_t seed, FactorDistribution factors) {
  const auto r = static_cast<std::size_t>(sigma.size());
  if (r == 0 || r > std::min(m, n)) {
    throw std::invalid_argument("matrix_with_spectrum: spectrum length must be in [1, min(m, n)]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    if (factors == FactorDistribution::Rademacher) {
      return (rng() >> 63) != 0 ? 1.0 : -1.0;
    }
    return normal(rng);
  };
  Eigen::MatrixXd gu(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r));
  Eigen::MatrixXd gv(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (Eigen::Index j = 0; j < gu.cols(); ++j) {
    for (Eigen::Index i = 0; i < gu.rows(); ++i) {
      gu(i, j) = draw();
    }
  }
  for (Eigen::Index j = 0; j < gv.cols(); ++j) {
    for (Eigen::Index i = 0; i < gv.rows(); ++i) {
      gv(i, j) = draw();
    }
  }
  const Eigen::MatrixXd u = orthonormal_basis(gu);
  const Eigen::MatrixXd v = orthonormal_basis(gv);
  return u * sigma.asDiagonal() * v.transpose();
}

Eigen::VectorXd genetics_like_spectrum(std::size_t n, std::size_t k, double target_error, double head_decay) {
  if (k == 0 || k >= n) {
    throw std::invalid_argument("genetics_like_spectrum: need 0 < k < n");
  }
  if (!(target_error > 0.0 && target_error < 1.0)) {
    throw std::invalid_argument("genetics_like_spectrum: target error must be in (0, 1)");
  }
  if (!(head_decay > 0.0 && head_decay <= 1.0)) {
    throw std::invalid_argument("genetics_like_spectrum: head decay must be in (0, 1]");
  }
  Eigen::VectorXd sigma(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i) {
    sigma(static_cast<Eigen::Index>(i)) = std::pow(head_decay, static_cast<double>(i));
  }
  for (std::size_t i = k; i < n; ++i) {
    sigma(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(static_cast<double>(i - k + 1));
  }
  // Rescale the tail so that tail^2 / total^2 = target^2.
  const auto kk = static_cast<Eigen::Index>(k);
  const double head = sigma.head(kk).squaredNorm();
  const double tail = sigma.tail(sigma.size() - kk).squaredNorm();
  const double t2 = target_error * target_error;
  const double c = std::sqrt(t2 * head / ((1.0 - t2) * tail));
  sigma.tail(sigma.size() - kk) *= c;
  if (sigma(kk) > sigma(kk - 1)) {
    throw std::invalid_argument("genetics_like_spectrum: target error too large for a gap after k");
  }
  return sigma;
}

Eigen::MatrixXd genetics_like_matrix(std::size_t m, std::size_t n, std::size_t k, double target_error,
                                     std::uint64_t seed) {
  return matrix_with_spectrum(m, n, genetics_like_spectrum(n, k, target_error), seed, FactorDistribution::Rademacher);
}

double tail_relative_error(const Eigen::VectorXd& sigma, std::size_t k) {
  const auto kk = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), sigma.size());
  const double total = sigma.squaredNorm();
  if (total == 0.0) {
    return 0.0;
  }
  return std::sqrt(sigma.tail(sigma.size() - kk).squaredNorm() / total);
}

}  // namespace crossbar
