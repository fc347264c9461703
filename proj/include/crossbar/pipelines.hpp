// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossbar/analog_tile.hpp"
#include "crossbar/cost_model.hpp"
#include "crossbar/datasets.hpp"
#include "crossbar/frames.hpp"
#include "crossbar/rand_nla.hpp"
#include "crossbar/report.hpp"

namespace crossbar {

/// Independent stream seed derived from a base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// How a pipeline executes its linear algebra.
enum class PipelineMode : std::uint8_t { Digital, IdealAnalog, Analog };

std::string_view to_string(PipelineMode mode);
std::optional<PipelineMode> parse_pipeline_mode(std::string_view text);

// ---------------------------------------------------------------- classify

enum class ClassifyMode : std::uint8_t { Analog, IdealAnalog, DigitalStreaming, DigitalBaseline };

std::string_view to_string(ClassifyMode mode);
std::optional<ClassifyMode> parse_classify_mode(std::string_view text);

/// Device used by the classification study: small steps so that a full
/// sketch of 4096 rows stays well inside the weight range.
DeviceParams classification_device();

struct ClassifyOptions {
  ClassifyMode mode = ClassifyMode::Analog;
  int pulses = 63;
  std::uint64_t seed = 1;
  std::size_t blocks = 19;
  std::size_t ell = 76;
  DeviceParams device = classification_device();
  IOParams io{};
  HardwareProfile profile = HardwareProfile::low_end();
};

struct ClassifyResult {
  double accuracy = 0.0;
  Eigen::Vector3d w = Eigen::Vector3d::Zero();        // averaged regressor
  Eigen::Vector3d w_exact = Eigen::Vector3d::Zero();  // full least squares on the training set
  std::vector<double> cosine;                          // per block, against w_exact
  double mean_cosine = 0.0;
  std::uint64_t saturations = 0;
  CostLedger ledger;
  ExperimentReport report;
};

/// Sketches the replicated training design with a Rademacher S, solves each
/// block's 3-variable regression, averages the block solutions and
/// classifies the test set by sign(w . x).
ClassifyResult classify_pipeline(const CubeDataset& ds, const ClassifyOptions& options);

// ------------------------------------------------------------ sketch bench

struct SketchBenchOptions {
  std::vector<std::size_t> m_grid;
  std::vector<std::size_t> n_grid{2048, 4096};
  std::vector<std::size_t> ell_grid{256, 512, 1024, 2048};
  HardwareProfile hybrid = HardwareProfile::midpoint();
  DigitalProfile digital = DigitalProfile::calibrated(HardwareProfile::midpoint());
};

/// Powers of two 2^lo .. 2^hi.
std::vector<std::size_t> power_grid(unsigned lo, unsigned hi);

struct SketchBenchRow {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t ell = 0;
  Cost hybrid;
  Cost digital_memory;  // bandwidth-bound model
  Cost digital_flops;   // peak-throughput model
  std::uint64_t flops = 0;
  double bytes = 0.0;
  double speedup = 0.0;       // memory model time / hybrid time
  double energy_ratio = 0.0;  // memory model energy / hybrid energy
};

/// Arithmetic of a streamed digital sketch: the first row costs ell*n
/// multiplies, each later row ell*n multiply-adds.
std::uint64_t sketch_flops(std::size_t ell, std::size_t n, std::size_t m);
/// Bytes moved per streamed row: read and write the ell x n sketch, read the
/// row and the sketch column.
double sketch_row_bytes(std::size_t ell, std::size_t n, const DigitalProfile& digital);

SketchBenchRow sketch_bench_point(std::size_t m, std::size_t n, std::size_t ell, const HardwareProfile& hybrid,
                                  const DigitalProfile& digital);
std::vector<SketchBenchRow> sketch_benchmark(const SketchBenchOptions& options);

void write_sketch_bench_csv(std::ostream& out, const std::vector<SketchBenchRow>& rows);
/// Writes sketch_bench.csv, sketch_time.svg and sketch_energy.svg.
void save_sketch_bench(const std::filesystem::path& dir, const std::vector<SketchBenchRow>& rows);

// ------------------------------------------------------------------ bgsub

struct BgsubOptions {
  PipelineMode mode = PipelineMode::Analog;
  PCAConfig pca{};
  DeviceParams device{};
  IOParams io{};
  HardwareProfile profile = HardwareProfile::low_end();
  /// Fraction of max |foreground| above which a pixel counts as moving.
  double mask_threshold = 0.5;
};

struct BgsubResult {
  Eigen::MatrixXd foreground;  // frames x pixels
  Eigen::MatrixXd background;  // frames x pixels, mean added back
  std::vector<double> residual;  // per frame ||foreground|| / ||centered frame||
  PCAResult pca;
  CostLedger ledger;
  ExperimentReport report;
};

/// Mean-centers the pixels x frames matrix over frames, computes k
/// principal components and removes their span from every frame.
BgsubResult bgsub_pipeline(const FrameStack& frames, const BgsubOptions& options);

/// ||a - b||_F / ||b||_F.
double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Per frame, true where |foreground| exceeds fraction * max |foreground|.
std::vector<std::vector<bool>> foreground_mask(const Eigen::MatrixXd& foreground, double fraction);

/// Intersection over union pooled over all frames.
double mask_iou(const std::vector<std::vector<bool>>& predicted, const std::vector<std::vector<bool>>& truth);

/// Writes |foreground| frames as fg_0000.pgm ... scaled by the global max.
void write_foreground_frames(const std::filesystem::path& dir, const Eigen::MatrixXd& foreground, std::size_t height,
                             std::size_t width);

// -------------------------------------------------------------- pca study

struct PcaStudyOptions {
  std::size_t k = 5;
  std::vector<std::size_t> ell_multipliers{1, 2, 3};
  std::size_t q = 2;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  PipelineMode mode = PipelineMode::Analog;
  DeviceParams device{};
  IOParams io{};
};

struct PcaStudyRow {
  std::size_t ell = 0;
  std::vector<double> errors;
  double mean = 0.0;
  double median = 0.0;
};

struct PcaStudyResult {
  PcaStudyRow digital;              // ell = k, all-digital randomized PCA
  std::vector<PcaStudyRow> hybrid;  // one per ell multiplier
  double optimal_error = 0.0;       // truncated SVD
  ExperimentReport report;
};

/// Relative projection error of digital randomized PCA (ell = k) and of the
/// selected pipeline mode for ell in {k, 2k, ...}, over independent trials.
PcaStudyResult pca_error_study(const Eigen::MatrixXd& a, const PcaStudyOptions& options);

double median_of(std::vector<double> values);

}  // namespace crossbar
