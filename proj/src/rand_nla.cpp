// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/rand_nla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crossbar/errors.hpp"

namespace crossbar {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Largest-magnitude entry of each left singular vector is made positive.
void normalize_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index idx = 0;
    u.col(c).cwiseAbs().maxCoeff(&idx);
    if (u(idx, c) < 0.0) {
      u.col(c) *= -1.0;
      v.col(c) *= -1.0;
    }
  }
}

// Digital stage shared by all PCA variants: Q = orth(Y), B = Q^T A,
// small SVD, U_k = Q U~_k.
PCAResult finish_pca(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a, const PCAConfig& cfg) {
  PCAResult out;
  out.ell = cfg.ell;
  out.power = cfg.q;
  out.seed = cfg.seed;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted(y);
  const auto rank = static_cast<std::size_t>(pivoted.rank());
  Eigen::MatrixXd q;
  if (rank < cfg.ell) {
    out.rank_deficient = true;
    const Eigen::MatrixXd full_q = pivoted.householderQ();
    q = full_q.leftCols(static_cast<Eigen::Index>(rank));
  } else {
    q = orthonormal_basis(y);
  }
  if (rank == 0) {
    throw SingularSystemError("sketch of the matrix is zero", 0);
  }

  const Eigen::MatrixXd b = q.transpose() * a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto k = static_cast<Eigen::Index>(std::min({cfg.k, rank, static_cast<std::size_t>(b.cols())}));
  if (static_cast<std::size_t>(k) < cfg.k) {
    out.rank_deficient = true;
  }
  out.k = static_cast<std::size_t>(k);
  out.u_k = q * svd.matrixU().leftCols(k);
  out.sigma_k = svd.singularValues().head(k);
  out.v_k = svd.matrixV().leftCols(k);
  normalize_signs(out.u_k, out.v_k);
  if (cfg.keep_intermediates) {
    out.q = q;
    out.b = b;
  }
  return out;
}

Eigen::MatrixXd hybrid_range(AnalogTile& tile, const PCAConfig& cfg) {
  const auto m = static_cast<Eigen::Index>(tile.rows());
  const auto n = tile.cols();
  const Eigen::MatrixXd r = pca_test_matrix(n, cfg.ell, cfg.seed);
  Eigen::MatrixXd y(m, static_cast<Eigen::Index>(cfg.ell));
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const VectorHandle r_bar = tile.write_vector(r.col(j));
    Eigen::VectorXd cur = tile.cached(r_bar);
    for (std::size_t i = 0; i < cfg.q; ++i) {
      const Eigen::VectorXd z = tile.mv(cur, cfg.max_halvings);
      cur = tile.mv_transpose(z, cfg.max_halvings);
    }
    const Eigen::VectorXd z = tile.mv(cur, cfg.max_halvings);
    y.col(j) = tile.read_vector(tile.stage(z));
  }
  return y;
}

void check_pca_shape(std::size_t m, std::size_t n, const PCAConfig& cfg) {
  cfg.validate();
  if (m < n) {
    throw std::invalid_argument("randomized PCA expects a tall matrix (rows >= cols)");
  }
  if (cfg.ell > std::min(m, n)) {
    throw std::invalid_argument("sketch size exceeds min(rows, cols)");
  }
}

}  // namespace

void SketchConfig::validate() const {
  if (ell < 1) {
    throw std::invalid_argument("sketch size must be at least one");
  }
  if (!(update_scale > 0.0) || !std::isfinite(update_scale)) {
    throw std::invalid_argument("update_scale must be positive");
  }
  pulses.validate();
}

void PCAConfig::validate() const {
  if (k < 1) {
    throw std::invalid_argument("rank must be at least one");
  }
  if (ell < k) {
    throw std::invalid_argument("sketch size must be at least the rank");
  }
  if (!(headroom > 0.0) || headroom > 1.0) {
    throw std::invalid_argument("headroom must lie in (0, 1]");
  }
  if (max_halvings < 0) {
    throw std::invalid_argument("max_halvings must be nonnegative");
  }
}

RowSource rows_of(const Eigen::MatrixXd& a) {
  return [&a, next = Eigen::Index{0}]() mutable -> std::optional<Eigen::VectorXd> {
    if (next >= a.rows()) {
      return std::nullopt;
    }
    return Eigen::VectorXd(a.row(next++).transpose());
  };
}

SketchColumnGenerator::SketchColumnGenerator(std::size_t ell, SketchDistribution dist, std::uint64_t seed)
    : ell_(ell), dist_(dist), rng_(seed) {}

Eigen::VectorXd SketchColumnGenerator::next() {
  Eigen::VectorXd s(static_cast<Eigen::Index>(ell_));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (dist_ == SketchDistribution::Gaussian) {
      s[i] = normal_(rng_);
    } else {
      s[i] = (rng_() >> 63) != 0 ? 1.0 : -1.0;
    }
  }
  return s;
}

Eigen::MatrixXd sketch_matrix(std::size_t ell, std::size_t m, SketchDistribution dist, std::uint64_t seed) {
  SketchColumnGenerator gen(ell, dist, seed);
  Eigen::MatrixXd s(static_cast<Eigen::Index>(ell), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    s.col(j) = gen.next();
  }
  return s;
}

SketchResult sketch_stream(const RowSource& rows, const SketchConfig& cfg, AnalogTile& tile) {
  cfg.validate();
  if (tile.rows() != cfg.ell) {
    throw std::invalid_argument("tile rows must equal the sketch size");
  }
  tile.reset();
  if (cfg.initialize_array && tile.ledger() != nullptr) {
    tile.ledger()->record(Primitive::MatrixWrite);
  }

  SketchColumnGenerator gen(cfg.ell, cfg.dist, cfg.seed);
  SketchResult out;
  out.seed = cfg.seed;
  while (auto row = rows()) {
    if (static_cast<std::size_t>(row->size()) != tile.cols()) {
      throw std::invalid_argument("streamed row length does not match the tile");
    }
    const Eigen::VectorXd s = gen.next();
    tile.update(cfg.update_scale * s, *row, cfg.pulses);
    ++out.rows_streamed;
  }
  out.z = tile.read() / cfg.update_scale;
  return out;
}

Eigen::VectorXd sketched_olls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SketchConfig& cfg,
                              AnalogTile& tile) {
  if (b.size() != a.rows()) {
    throw std::invalid_argument("right-hand side length does not match the matrix");
  }
  const auto n = static_cast<std::size_t>(a.cols());
  if (cfg.ell < n + 1) {
    throw std::invalid_argument("sketched least squares needs ell >= n + 1");
  }
  if (tile.cols() != n + 1) {
    throw std::invalid_argument("tile must have n + 1 columns for the augmented matrix");
  }
  RowSource augmented = [&, next = Eigen::Index{0}]() mutable -> std::optional<Eigen::VectorXd> {
    if (next >= a.rows()) {
      return std::nullopt;
    }
    Eigen::VectorXd row(a.cols() + 1);
    row.head(a.cols()) = a.row(next).transpose();
    row[a.cols()] = b[next];
    ++next;
    return row;
  };
  const SketchResult sk = sketch_stream(augmented, cfg, tile);
  const auto cols = static_cast<Eigen::Index>(n);
  return solve_least_squares(sk.z.leftCols(cols), sk.z.col(cols));
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (b.size() != a.rows()) {
    throw std::invalid_argument("right-hand side length does not match the matrix");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < static_cast<std::size_t>(a.cols())) {
    throw SingularSystemError("least-squares matrix is rank deficient", rank);
  }
  return qr.solve(b);
}

Eigen::VectorXd exact_olls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return solve_least_squares(a, b);
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index cols = std::min(a.rows(), a.cols());
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), cols);
}

DistortionStats embedding_distortion(const Eigen::MatrixXd& a, const SketchApply& apply, std::size_t trials) {
  if (trials == 0) {
    throw std::invalid_argument("need at least one trial");
  }
  const Eigen::MatrixXd u = orthonormal_basis(a);
  DistortionStats stats;
  stats.per_trial.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::MatrixXd su = apply(u, t);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(su);
    const Eigen::VectorXd sq = svd.singularValues().array().square();
    double eps = (sq.array() - 1.0).abs().maxCoeff();
    // Missing singular values (sketch narrower than the subspace) are zeros.
    if (sq.size() < u.cols()) {
      eps = std::max(eps, 1.0);
    }
    stats.per_trial.push_back(eps);
  }
  std::vector<double> sorted = stats.per_trial;
  std::sort(sorted.begin(), sorted.end());
  stats.median = median_of(sorted);
  const auto rank90 = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(sorted.size())));
  stats.q90 = sorted[std::max<std::size_t>(rank90, 1) - 1];
  stats.max = sorted.back();
  return stats;
}

SketchApply gaussian_sketch_apply(std::size_t ell, std::uint64_t seed) {
  return [ell, seed](const Eigen::MatrixXd& x, std::size_t trial) -> Eigen::MatrixXd {
    const Eigen::MatrixXd s = sketch_matrix(ell, static_cast<std::size_t>(x.rows()),
                                            SketchDistribution::Gaussian, seed + trial);
    return (s * x) / std::sqrt(static_cast<double>(ell));
  };
}

Eigen::MatrixXd pca_test_matrix(std::size_t n, std::size_t ell, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ell));
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      r(i, j) = normal(rng);
    }
  }
  return r;
}

PCAResult randomized_pca(const Eigen::MatrixXd& a, const PCAConfig& cfg, AnalogTile& tile) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  check_pca_shape(m, n, cfg);
  if (tile.rows() != m || tile.cols() != n) {
    throw std::invalid_argument("tile dimensions must match the matrix");
  }
  std::optional<double> bound;
  if (cfg.avoid_saturation && std::isfinite(tile.io().out_bound_factor)) {
    bound = tile.io().out_bound_factor * tile.device().w_max;
  }
  const TileScaling scaled = scale_for_tile(a, tile.device().w_max, cfg.headroom, bound);
  tile.load(scaled.scaled);

  PCAResult out = finish_pca(hybrid_range(tile, cfg), a, cfg);
  out.scale = scaled.scale;
  return out;
}

PCAResult randomized_pca_resident(AnalogTile& tile, const PCAConfig& cfg, double scale) {
  check_pca_shape(tile.rows(), tile.cols(), cfg);
  if (!(scale > 0.0)) {
    throw std::invalid_argument("scale must be positive");
  }
  const Eigen::MatrixXd y = hybrid_range(tile, cfg);
  const Eigen::MatrixXd a = tile.read() / scale;
  PCAResult out = finish_pca(y, a, cfg);
  out.scale = scale;
  return out;
}

PCAResult randomized_pca_digital(const Eigen::MatrixXd& a, const PCAConfig& cfg) {
  check_pca_shape(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), cfg);
  const Eigen::MatrixXd r = pca_test_matrix(static_cast<std::size_t>(a.cols()), cfg.ell, cfg.seed);
  Eigen::MatrixXd y = a * r;
  for (std::size_t i = 0; i < cfg.q; ++i) {
    y = a * (a.transpose() * y);
  }
  return finish_pca(y, a, cfg);
}

void low_rank_update(AnalogTile& tile, const LowRankUpdate& upd, const PulseConfig& pulses, double scale) {
  if (upd.c.cols() != upd.d.cols() || upd.c.cols() < 1) {
    throw std::invalid_argument("update factors need the same, nonzero number of columns");
  }
  if (static_cast<std::size_t>(upd.c.rows()) != tile.rows() ||
      static_cast<std::size_t>(upd.d.rows()) != tile.cols()) {
    throw std::invalid_argument("update factors do not match the tile");
  }
  for (Eigen::Index p = 0; p < upd.c.cols(); ++p) {
    tile.update(scale * upd.c.col(p), upd.d.col(p), pulses);
  }
}

TruncatedSVD exact_truncated_svd(const Eigen::MatrixXd& a, std::size_t k) {
  const auto full = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
  if (k < 1 || k > full) {
    throw std::invalid_argument("rank out of range for truncated SVD");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  TruncatedSVD out{svd.matrixU().leftCols(kk), svd.singularValues().head(kk), svd.matrixV().leftCols(kk)};
  normalize_signs(out.u, out.v);
  return out;
}

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& a) {
  if (a.rows() < 1) {
    throw std::invalid_argument("centering needs at least one row");
  }
  const Eigen::RowVectorXd mean = a.colwise().mean();
  return (a.rowwise() - mean) / std::sqrt(static_cast<double>(a.rows()));
}

double projection_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& u) {
  const double norm = a.norm();
  if (norm == 0.0) {
    return 0.0;
  }
  return (a - u * (u.transpose() * a)).norm() / norm;
}

double max_principal_angle(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  const Eigen::MatrixXd residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  const double s = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  return std::asin(std::min(1.0, s));
}

}  // namespace crossbar
