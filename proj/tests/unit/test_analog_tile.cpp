// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "crossbar/analog_tile.hpp"
#include "crossbar/errors.hpp"
#include "crossbar/quantize.hpp"

namespace crossbar {
namespace {

DeviceParams uniform_device() {
  DeviceParams d;
  d.d2d_std = 0.0;
  d.asym_std = 0.0;
  return d;
}

PulseConfig ideal_pulses() {
  PulseConfig p;
  p.mode = UpdateMode::Ideal;
  return p;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    m.data()[k] = u(rng);
  }
  return m;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

// --- construction ----------------------------------------------------------

TEST(AnalogTile, FreshTileIsZero) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 0);
  EXPECT_EQ(t.weights(), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 2u);
}

TEST(AnalogTile, ZeroDimensionRejected) {
  EXPECT_THROW(AnalogTile(0, 3, DeviceParams{}, IOParams{}, 1), std::invalid_argument);
  EXPECT_THROW(AnalogTile(3, 0, DeviceParams{}, IOParams{}, 1), std::invalid_argument);
}

TEST(AnalogTile, InvalidParametersRejected) {
  DeviceParams d;
  d.dw_min = 0.0;
  EXPECT_THROW(AnalogTile(2, 2, d, IOParams{}, 1), std::invalid_argument);
  d = DeviceParams{};
  d.p2p_std = -0.1;
  EXPECT_THROW(AnalogTile(2, 2, d, IOParams{}, 1), std::invalid_argument);
  IOParams io;
  io.out_bound_factor = std::numeric_limits<double>::infinity();
  EXPECT_THROW(AnalogTile(2, 2, DeviceParams{}, io, 1), std::invalid_argument);
  io = IOParams{};
  io.adc_bits = 0;
  EXPECT_THROW(AnalogTile(2, 2, DeviceParams{}, io, 1), std::invalid_argument);
}

TEST(AnalogTile, ZeroVarianceStepsEqualDwMin) {
  DeviceParams d = uniform_device();
  d.dw_min = 0.0025;
  AnalogTile t(2, 2, d, IOParams{}, 7);
  EXPECT_TRUE((t.step_up().array() == 0.0025).all());
  EXPECT_TRUE((t.step_down().array() == 0.0025).all());
}

TEST(AnalogTile, SameSeedSameDeviceSteps) {
  AnalogTile a(6, 5, DeviceParams{}, IOParams{}, 42);
  AnalogTile b(6, 5, DeviceParams{}, IOParams{}, 42);
  AnalogTile c(6, 5, DeviceParams{}, IOParams{}, 43);
  EXPECT_EQ(a.step_up(), b.step_up());
  EXPECT_EQ(a.step_down(), b.step_down());
  EXPECT_NE(a.step_up(), c.step_up());
  EXPECT_TRUE((a.step_up().array() > 0.0).all());
}

// --- reset / load ----------------------------------------------------------

TEST(AnalogTile, ResetZeroesAndIsIdempotent) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams::ideal(), 3);
  Eigen::MatrixXd w(2, 2);
  w << 0.3, -0.1, 0.0, 0.9;
  t.load(w);
  const Eigen::MatrixXd steps = t.step_up();
  t.reset();
  EXPECT_EQ(t.weights(), Eigen::MatrixXd::Zero(2, 2));
  t.reset();
  EXPECT_EQ(t.weights(), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(t.step_up(), steps);
  EXPECT_EQ(t.mv(Eigen::Vector2d(1.0, -2.0)), Eigen::VectorXd::Zero(2));
}

TEST(AnalogTile, NoiselessLoadIsExact) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 1);
  const Eigen::MatrixXd w = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  t.load(w);
  EXPECT_EQ(t.weights(), w);
}

TEST(AnalogTile, LoadRejectsOutOfRangeAndBadShape) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 1);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(1, 0) = 1.5;
  EXPECT_THROW(t.load(w), std::out_of_range);
  EXPECT_THROW(t.load(Eigen::MatrixXd::Zero(3, 2)), std::invalid_argument);
  w(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(t.load(w), std::invalid_argument);
}

TEST(AnalogTile, WriteNoiseStaysInsideBound) {
  DeviceParams d;
  d.write_noise_std = 0.5;
  AnalogTile t(20, 20, d, IOParams{}, 5);
  t.load(Eigen::MatrixXd::Constant(20, 20, 0.9));
  EXPECT_LE(t.weights().cwiseAbs().maxCoeff(), d.w_max);
  EXPECT_GT((t.weights().array() - 0.9).abs().maxCoeff(), 0.0);
}

// --- MV products -----------------------------------------------------------

TEST(AnalogTile, IdealMvIsExact) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams::ideal(), 1);
  t.load(0.5 * Eigen::MatrixXd::Identity(2, 2));
  const Eigen::VectorXd y = t.mv(Eigen::Vector2d(0.5, -0.25));
  EXPECT_DOUBLE_EQ(y[0], 0.25);
  EXPECT_DOUBLE_EQ(y[1], -0.125);
}

TEST(AnalogTile, IdealTransposeReadsColumns) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams::ideal(), 1);
  Eigen::MatrixXd w(2, 2);
  w << 0.1, 0.2, 0.3, 0.4;
  t.load(w);
  const Eigen::VectorXd y = t.mv_transpose(Eigen::Vector2d(1.0, 0.0));
  EXPECT_DOUBLE_EQ(y[0], 0.1);
  EXPECT_DOUBLE_EQ(y[1], 0.2);
}

TEST(AnalogTile, IdealTransposeOnSymmetricMatchesMv) {
  Eigen::MatrixXd a = random_matrix(8, 8, 11);
  a = 0.5 * (a + a.transpose()).eval();
  AnalogTile t(8, 8, DeviceParams{}, IOParams::ideal(), 1);
  t.load(a);
  const Eigen::VectorXd x = random_matrix(8, 1, 12, 1.0);
  EXPECT_LT((t.mv(x) - t.mv_transpose(x)).norm(), 1e-14);
}

TEST(AnalogTile, IdealModeMatchesDenseOracle) {
  const Eigen::MatrixXd a = random_matrix(32, 32, 21, 0.2);
  AnalogTile t(32, 32, DeviceParams{}, IOParams::ideal(), 9);
  t.load(a);
  const Eigen::VectorXd x = random_matrix(32, 1, 22, 3.0);
  const Eigen::VectorXd r = random_matrix(32, 1, 23, 3.0);
  EXPECT_LT(rel_err(t.mv(x), a * x), 1e-12);
  EXPECT_LT(rel_err(t.mv_transpose(x), a.transpose() * x), 1e-12);
  EXPECT_LT(rel_err(t.mv_transpose(t.mv(r)), a.transpose() * a * r), 1e-12);
  EXPECT_LT(rel_err(t.read(), a), 1e-12);

  const Eigen::VectorXd u = random_matrix(32, 1, 24);
  const Eigen::VectorXd v = random_matrix(32, 1, 25);
  t.update(u, v, ideal_pulses());
  EXPECT_LT(rel_err(t.weights(), a + u * v.transpose()), 1e-12);
}

TEST(AnalogTile, IdealModeIgnoresSeed) {
  const Eigen::MatrixXd a = random_matrix(5, 4, 3);
  const Eigen::VectorXd x = random_matrix(4, 1, 4, 1.0);
  AnalogTile t1(5, 4, DeviceParams{}, IOParams::ideal(), 1);
  AnalogTile t2(5, 4, DeviceParams{}, IOParams::ideal(), 999);
  t1.load(a);
  t2.load(a);
  EXPECT_EQ(t1.mv(x), t2.mv(x));
  EXPECT_EQ(t1.read(), t2.read());
}

TEST(AnalogTile, NoisyMvDeterministicUnderSeed) {
  const Eigen::MatrixXd a = random_matrix(6, 6, 31);
  const Eigen::VectorXd x = random_matrix(6, 1, 32, 1.0);
  AnalogTile t1(6, 6, DeviceParams{}, IOParams{}, 77);
  AnalogTile t2(6, 6, DeviceParams{}, IOParams{}, 77);
  t1.load(a);
  t2.load(a);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(t1.mv(x), t2.mv(x));
  }
}

TEST(AnalogTile, NoisyMvMeanMatchesQuantizedProduct) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 2024);
  t.load(0.5 * Eigen::MatrixXd::Identity(2, 2));
  const Eigen::Vector2d x(0.5, -0.25);
  const int trials = 10000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Vector2d sum_sq = Eigen::Vector2d::Zero();
  for (int k = 0; k < trials; ++k) {
    const Eigen::VectorXd y = t.mv(x);
    sum += y;
    sum_sq += y.cwiseProduct(y);
  }
  const Eigen::Vector2d mean = sum / trials;
  // Noise management: alpha = 0.5, so the DAC sees (1, -0.5).
  const double alpha = 0.5;
  const Eigen::Vector2d expected(0.5 * alpha * quantize_symmetric(1.0, 7, 1.0),
                                 0.5 * alpha * quantize_symmetric(-0.5, 7, 1.0));
  for (int i = 0; i < 2; ++i) {
    const double var = sum_sq[i] / trials - mean[i] * mean[i];
    const double se = std::sqrt(var / trials);
    EXPECT_LT(std::abs(mean[i] - expected[i]), 4.0 * se) << i;
  }
  // Output noise is sigma_out * w_max before the alpha rescale.
  const double sd0 = std::sqrt(sum_sq[0] / trials - mean[0] * mean[0]);
  EXPECT_NEAR(sd0, alpha * 0.1, 0.1 * alpha * 0.1);
  EXPECT_NEAR(mean[0], 0.25, 0.01);
  EXPECT_NEAR(mean[1], -0.125, 0.01);
}

TEST(AnalogTile, OutputsClipAtBound) {
  AnalogTile t(1, 100, DeviceParams{}, IOParams{}, 3);
  t.load(Eigen::MatrixXd::Ones(1, 100));
  EXPECT_DOUBLE_EQ(t.mv(Eigen::VectorXd::Ones(100))[0], 20.0);
  EXPECT_DOUBLE_EQ(t.mv(-Eigen::VectorXd::Ones(100))[0], -20.0);
  // Noise management rescales the clipped value by alpha.
  EXPECT_DOUBLE_EQ(t.mv(Eigen::VectorXd::Constant(100, 3.0))[0], 60.0);
}

TEST(AnalogTile, OutputsNeverExceedAlphaTimesBound) {
  const Eigen::MatrixXd a = random_matrix(16, 64, 41, 1.0);
  AnalogTile t(16, 64, DeviceParams{}, IOParams{}, 4);
  t.load(a);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd x = random_matrix(64, 1, 100 + k, 2.0);
    const double alpha = x.cwiseAbs().maxCoeff();
    EXPECT_LE(t.mv(x).cwiseAbs().maxCoeff(), 20.0 * alpha * (1 + 1e-12));
  }
}

TEST(AnalogTile, ZeroInputGivesQuantizedNoise) {
  IOParams io;
  io.sigma_out = 0.0;
  AnalogTile t(3, 3, DeviceParams{}, io, 1);
  t.load(random_matrix(3, 3, 5));
  EXPECT_EQ(t.mv(Eigen::VectorXd::Zero(3)), Eigen::VectorXd::Zero(3));
}

TEST(AnalogTile, MvRejectsBadInput) {
  AnalogTile t(3, 2, DeviceParams{}, IOParams{}, 1);
  EXPECT_THROW(t.mv(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  EXPECT_THROW(t.mv_transpose(Eigen::VectorXd::Zero(2)), std::invalid_argument);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  x[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(t.mv(x), std::invalid_argument);
  EXPECT_THROW(t.mv(Eigen::VectorXd::Zero(2), -1), std::invalid_argument);
}

TEST(AnalogTile, BoundManagementRecoversSaturatedOutput) {
  CostLedger ledger;
  AnalogTile t(1, 100, DeviceParams{}, IOParams{}, 8);
  t.load(Eigen::MatrixXd::Constant(1, 100, 0.5));
  t.attach_ledger(ledger);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(100);
  EXPECT_DOUBLE_EQ(t.mv(x)[0], 20.0);
  EXPECT_EQ(ledger.count(Primitive::Mv), 1u);
  // 50 -> 25 (still clipped) -> 12.5 fits: three attempts.
  const double y = t.mv(x, 8)[0];
  EXPECT_EQ(ledger.count(Primitive::Mv), 4u);
  EXPECT_NEAR(y, 50.0, 2.0);
  // A budget of one halving is not enough.
  EXPECT_DOUBLE_EQ(t.mv(x, 1)[0], 40.0);
}

TEST(AnalogTile, BoundManagementLeavesUnsaturatedProductsAlone) {
  CostLedger ledger;
  AnalogTile t(4, 4, DeviceParams{}, IOParams{}, 8);
  t.load(random_matrix(4, 4, 6));
  t.attach_ledger(ledger);
  t.mv(Eigen::VectorXd::Ones(4), 8);
  t.mv_transpose(Eigen::VectorXd::Ones(4), 8);
  EXPECT_EQ(ledger.count(Primitive::Mv), 2u);
}

// --- OP updates ------------------------------------------------------------

TEST(AnalogTile, IdealUpdateOfUnitVectors) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 1);
  t.update(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), ideal_pulses());
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  expected(0, 1) = 1.0;
  EXPECT_EQ(t.weights(), expected);
}

TEST(AnalogTile, ZeroUpdateLeavesWeights) {
  AnalogTile t(2, 3, DeviceParams{}, IOParams{}, 1);
  t.load(random_matrix(2, 3, 8));
  const Eigen::MatrixXd before = t.weights();
  t.update(Eigen::VectorXd::Zero(2), random_matrix(3, 1, 9), PulseConfig{});
  EXPECT_EQ(t.weights(), before);
  t.update(Eigen::VectorXd::Zero(2), random_matrix(3, 1, 9), ideal_pulses());
  EXPECT_EQ(t.weights(), before);
}

TEST(AnalogTile, UpdateRejectsBadInput) {
  AnalogTile t(2, 3, DeviceParams{}, IOParams{}, 1);
  EXPECT_THROW(t.update(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), PulseConfig{}),
               std::invalid_argument);
  PulseConfig bad;
  bad.bl = 0;
  EXPECT_THROW(t.update(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3), bad), std::invalid_argument);
}

TEST(AnalogTile, StochasticUpdateIsUnbiased) {
  AnalogTile t(2, 2, uniform_device(), IOParams{}, 17);
  const Eigen::Vector2d u(0.1, -0.05);
  const Eigen::Vector2d v(0.025, 0.1);
  const Eigen::Matrix2d target = u * v.transpose();
  PulseConfig pulses;
  pulses.bl = 31;

  const int trials = 20000;
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d sum_sq = Eigen::Matrix2d::Zero();
  for (int k = 0; k < trials; ++k) {
    t.reset();
    t.update(u, v, pulses);
    sum += t.weights();
    sum_sq += t.weights().cwiseProduct(t.weights());
  }
  EXPECT_EQ(t.saturation_count(), 0u);
  const Eigen::Matrix2d mean = sum / trials;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double var = sum_sq(i, j) / trials - mean(i, j) * mean(i, j);
      const double se = std::sqrt(var / trials);
      EXPECT_LT(std::abs(mean(i, j) - target(i, j)), 4.0 * se) << i << "," << j;
    }
  }
}

TEST(AnalogTile, StochasticStepsAreMultiplesOfDwWithoutPulseNoise) {
  DeviceParams d = uniform_device();
  d.p2p_std = 0.0;
  AnalogTile t(3, 3, d, IOParams{}, 4);
  PulseConfig pulses;
  pulses.bl = 15;
  t.update(Eigen::Vector3d(0.01, -0.02, 0.005), Eigen::Vector3d(0.02, 0.01, -0.01), pulses);
  for (Eigen::Index k = 0; k < t.weights().size(); ++k) {
    const double n = t.weights().data()[k] / d.dw_min;
    EXPECT_NEAR(n, std::round(n), 1e-9);
    EXPECT_LE(std::abs(n), 15.0);
  }
}

TEST(AnalogTile, OversizedUpdatesSaturateAndStayBounded) {
  AnalogTile t(4, 4, DeviceParams{}, IOParams{}, 12);
  PulseConfig pulses;
  pulses.bl = 63;
  for (int k = 0; k < 200; ++k) {
    t.update(Eigen::VectorXd::Constant(4, 5.0), Eigen::VectorXd::Constant(4, 5.0), pulses);
    ASSERT_LE(t.weights().cwiseAbs().maxCoeff(), t.device().w_max);
  }
  EXPECT_GT(t.saturation_count(), 0u);
}

TEST(AnalogTile, IdealUpdateClipsAtBound) {
  AnalogTile t(1, 1, DeviceParams{}, IOParams{}, 1);
  t.update(Eigen::VectorXd::Constant(1, 0.6), Eigen::VectorXd::Constant(1, 0.9), ideal_pulses());
  EXPECT_DOUBLE_EQ(t.weights()(0, 0), 0.54);
  t.update(Eigen::VectorXd::Constant(1, 0.6), Eigen::VectorXd::Constant(1, 0.9), ideal_pulses());
  EXPECT_DOUBLE_EQ(t.weights()(0, 0), 1.0);
}

// --- readout and cache -----------------------------------------------------

TEST(AnalogTile, IdealReadIsExactAndZeroTileReadsZero) {
  AnalogTile t(3, 4, DeviceParams{}, IOParams::ideal(), 1);
  EXPECT_EQ(t.read(), Eigen::MatrixXd::Zero(3, 4));
  const Eigen::MatrixXd a = random_matrix(3, 4, 50);
  t.load(a);
  EXPECT_EQ(t.read(), a);
}

TEST(AnalogTile, NoisyReadWithinAdcStepAndNoiseTail) {
  const Eigen::MatrixXd a = random_matrix(32, 32, 51, 1.0);
  AnalogTile t(32, 32, DeviceParams{}, IOParams{}, 52);
  t.load(a);
  const double tol = quantization_step(9, 20.0) + 4.0 * 0.1;
  const Eigen::MatrixXd r = t.read();
  EXPECT_LE((r - a).cwiseAbs().maxCoeff(), tol);
}

TEST(AnalogTile, VectorCacheRoundTripAndCosts) {
  CostLedger ledger;
  AnalogTile t(3, 3, DeviceParams{}, IOParams{}, 1);
  t.attach_ledger(ledger);
  const Eigen::Vector3d x(1.5, -2.0, 1e-17);
  const VectorHandle h = t.write_vector(x);
  EXPECT_EQ(ledger.count(Primitive::VectorWrite), 1u);
  const double time_after_write = ledger.time_us();
  EXPECT_DOUBLE_EQ(time_after_write, vector_read_cost(ledger.profile()).time_us);
  EXPECT_EQ(t.read_vector(h), x);
  EXPECT_EQ(ledger.count(Primitive::VectorRead), 1u);
  EXPECT_EQ(t.cached(h), x);
  EXPECT_THROW(t.write_vector(Eigen::VectorXd()), std::invalid_argument);
}

TEST(AnalogTile, StaleAndForeignHandlesRejected) {
  AnalogTile t(2, 2, DeviceParams{}, IOParams{}, 1);
  AnalogTile other(2, 2, DeviceParams{}, IOParams{}, 1);
  const VectorHandle h = t.write_vector(Eigen::Vector2d(1, 2));
  EXPECT_THROW(other.read_vector(h), InvalidState);
  t.reset();
  EXPECT_THROW(t.read_vector(h), InvalidState);
  const VectorHandle h2 = t.write_vector(Eigen::Vector2d(3, 4));
  t.load(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_THROW(t.cached(h2), InvalidState);
}

TEST(AnalogTile, LedgerCountsLoadAndRead) {
  CostLedger ledger;
  AnalogTile t(3, 5, DeviceParams{}, IOParams{}, 1);
  t.attach_ledger(ledger);
  t.load(random_matrix(3, 5, 2));
  t.read();
  t.reset();
  EXPECT_EQ(ledger.count(Primitive::MatrixWrite), 1u);
  EXPECT_EQ(ledger.count(Primitive::MatrixRead), 1u);
  // The one-hot products inside a read are part of the read's cost.
  EXPECT_EQ(ledger.count(Primitive::Mv), 0u);
  t.detach_ledger();
  t.mv(Eigen::VectorXd::Ones(5));
  EXPECT_EQ(ledger.count(Primitive::Mv), 0u);
}

// --- scaling helper --------------------------------------------------------

TEST(ScaleForTile, MaxAbsScaling) {
  Eigen::MatrixXd a(2, 2);
  a << 4.0, -8.0, 1.0, 2.0;
  const TileScaling s = scale_for_tile(a, 1.0);
  EXPECT_DOUBLE_EQ(s.scale, 0.5 / 8.0);
  EXPECT_DOUBLE_EQ(s.scaled.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_LT((s.scaled - s.scale * a).norm(), 1e-15);
}

TEST(ScaleForTile, OutputBoundCapsScale) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(4, 100);
  const TileScaling s = scale_for_tile(a, 1.0, 0.5, 20.0);
  EXPECT_DOUBLE_EQ(s.scale, 0.2);
  EXPECT_LE(s.scaled.rowwise().sum().maxCoeff(), 20.0 + 1e-12);
}

TEST(ScaleForTile, ZeroMatrixAndBadArguments) {
  const TileScaling s = scale_for_tile(Eigen::MatrixXd::Zero(2, 3), 1.0);
  EXPECT_EQ(s.scale, 1.0);
  EXPECT_THROW(scale_for_tile(Eigen::MatrixXd::Ones(2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(scale_for_tile(Eigen::MatrixXd::Ones(2, 2), 1.0, 1.5), std::invalid_argument);
}

}  // namespace
}  // namespace crossbar
