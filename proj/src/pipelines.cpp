// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "crossbar/svg_plot.hpp"

namespace crossbar {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::Digital: return "digital";
    case PipelineMode::IdealAnalog: return "ideal-analog";
    case PipelineMode::Analog: return "analog";
  }
  return "unknown";
}

std::optional<PipelineMode> parse_pipeline_mode(std::string_view text) {
  if (text == "digital") return PipelineMode::Digital;
  if (text == "ideal-analog") return PipelineMode::IdealAnalog;
  if (text == "analog" || text == "hybrid") return PipelineMode::Analog;
  return std::nullopt;
}

std::string_view to_string(ClassifyMode mode) {
  switch (mode) {
    case ClassifyMode::Analog: return "analog";
    case ClassifyMode::IdealAnalog: return "ideal-analog";
    case ClassifyMode::DigitalStreaming: return "digital-streaming";
    case ClassifyMode::DigitalBaseline: return "digital-baseline";
  }
  return "unknown";
}

std::optional<ClassifyMode> parse_classify_mode(std::string_view text) {
  if (text == "analog") return ClassifyMode::Analog;
  if (text == "ideal-analog") return ClassifyMode::IdealAnalog;
  if (text == "digital-streaming") return ClassifyMode::DigitalStreaming;
  if (text == "digital-baseline") return ClassifyMode::DigitalBaseline;
  return std::nullopt;
}

double median_of(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty set");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double mean_of(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) {
    s += v;
  }
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return a.dot(b) / (na * nb);
}

IOParams io_for(PipelineMode mode, const IOParams& io) {
  return mode == PipelineMode::IdealAnalog ? IOParams::ideal() : io;
}

}  // namespace

// ---------------------------------------------------------------- classify

DeviceParams classification_device() {
  DeviceParams d;
  d.dw_min = 3e-5;
  return d;
}

ClassifyResult classify_pipeline(const CubeDataset& ds, const ClassifyOptions& options) {
  if (options.blocks == 0) {
    throw std::invalid_argument("classify: need at least one block");
  }
  const std::size_t cols = 4 * options.blocks;
  if (options.ell < 4) {
    throw std::invalid_argument("classify: sketch size must be at least 4");
  }
  const Eigen::MatrixXd block = training_block(ds);
  const Eigen::MatrixXd design = replicate_design(block, options.blocks);

  ClassifyResult out;
  out.ledger = CostLedger(options.profile);
  out.w_exact = exact_olls(block.leftCols(3), block.col(3));

  std::vector<Eigen::Vector3d> ws;
  if (options.mode == ClassifyMode::DigitalBaseline) {
    ws.assign(options.blocks, out.w_exact);
  } else {
    Eigen::MatrixXd z;
    if (options.mode == ClassifyMode::DigitalStreaming) {
      z = sketch_matrix(options.ell, static_cast<std::size_t>(design.rows()), SketchDistribution::Rademacher,
                        options.seed) *
          design;
    } else {
      const bool ideal = options.mode == ClassifyMode::IdealAnalog;
      AnalogTile tile(options.ell, cols, options.device, ideal ? IOParams::ideal() : options.io,
                      derive_seed(options.seed, 1));
      tile.attach_ledger(out.ledger);
      SketchConfig cfg;
      cfg.ell = options.ell;
      cfg.dist = SketchDistribution::Rademacher;
      cfg.pulses.bl = options.pulses;
      cfg.pulses.mode = ideal ? UpdateMode::Ideal : UpdateMode::Stochastic;
      cfg.seed = options.seed;
      // With update management this puts the largest pulse probability at one.
      cfg.update_scale = static_cast<double>(options.pulses) * options.device.dw_min;
      z = sketch_stream(rows_of(design), cfg, tile).z;
      out.saturations = tile.saturation_count();
    }
    for (std::size_t i = 0; i < options.blocks; ++i) {
      const Eigen::MatrixXd zi = z.middleCols(static_cast<Eigen::Index>(4 * i), 4);
      ws.emplace_back(solve_least_squares(zi.leftCols(3), zi.col(3)));
    }
  }

  out.w.setZero();
  for (const auto& wi : ws) {
    out.w += wi;
    out.cosine.push_back(cosine(wi, out.w_exact));
  }
  out.w /= static_cast<double>(ws.size());
  out.mean_cosine = mean_of(out.cosine);

  std::size_t correct = 0;
  for (std::size_t idx : ds.test) {
    const auto r = static_cast<Eigen::Index>(idx);
    const double score = ds.points.row(r).dot(out.w);
    const double predicted = score >= 0.0 ? 1.0 : -1.0;
    if (predicted == ds.labels(r)) {
      ++correct;
    }
  }
  out.accuracy = ds.test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(ds.test.size());

  const std::string params = "mode=" + std::string(to_string(options.mode)) +
                             ";pulses=" + std::to_string(options.pulses);
  auto& rep = out.report;
  rep.add("classify", params, "accuracy", out.accuracy, options.seed);
  rep.add("classify", params, "mean_cosine_similarity", out.mean_cosine, options.seed);
  for (std::size_t i = 0; i < out.cosine.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof(name), "cosine_similarity_w%02zu", i + 1);
    rep.add("classify", params, name, out.cosine[i], options.seed);
  }
  rep.add("classify", params, "pulse_saturations", static_cast<double>(out.saturations), options.seed);
  rep.add("classify", params, "time_us", out.ledger.time_us(), options.seed);
  rep.add("classify", params, "energy_uj", out.ledger.energy_uj(), options.seed);
  return out;
}

// ------------------------------------------------------------ sketch bench

std::vector<std::size_t> power_grid(unsigned lo, unsigned hi) {
  if (lo > hi || hi > 62) {
    throw std::invalid_argument("power_grid: bad exponent range");
  }
  std::vector<std::size_t> out;
  for (unsigned e = lo; e <= hi; ++e) {
    out.push_back(std::size_t{1} << e);
  }
  return out;
}

std::uint64_t sketch_flops(std::size_t ell, std::size_t n, std::size_t m) {
  const std::uint64_t per = static_cast<std::uint64_t>(ell) * n;
  std::uint64_t total = 0;
  for (std::size_t row = 0; row < m; ++row) {
    total += row == 0 ? per : 2 * per;
  }
  return total;
}

double sketch_row_bytes(std::size_t ell, std::size_t n, const DigitalProfile& digital) {
  const double l = static_cast<double>(ell);
  const double c = static_cast<double>(n);
  return digital.precision_bytes * (2.0 * l * c + c + l);
}

SketchBenchRow sketch_bench_point(std::size_t m, std::size_t n, std::size_t ell, const HardwareProfile& hybrid,
                                  const DigitalProfile& digital) {
  if (m == 0 || n == 0 || ell == 0) {
    throw std::invalid_argument("sketch benchmark: dimensions must be positive");
  }
  const double logical = hybrid.logical_dim();
  if (static_cast<double>(n) > logical || static_cast<double>(ell) > logical) {
    throw std::invalid_argument("sketch benchmark: sketch does not fit the accelerator");
  }
  SketchBenchRow r;
  r.m = m;
  r.n = n;
  r.ell = ell;
  r.hybrid = static_cast<double>(m) * op_cost(hybrid) + matrix_read_cost(hybrid);
  r.flops = sketch_flops(ell, n, m);
  r.bytes = sketch_row_bytes(ell, n, digital) * static_cast<double>(m);

  const double flops = static_cast<double>(r.flops);
  const double row_flops = 2.0 * static_cast<double>(ell) * static_cast<double>(n);
  const double row_bytes = sketch_row_bytes(ell, n, digital);
  const double row_time =
      std::max(row_bytes / digital.bandwidth_bytes_per_us, row_flops / (digital.peak_flops * 1e-6));
  r.digital_memory.time_us = row_time * static_cast<double>(m);
  r.digital_memory.energy_uj = r.bytes * digital.energy_per_byte_uj;
  r.digital_flops.time_us = flops / (digital.peak_flops * 1e-6);
  r.digital_flops.energy_uj = r.digital_memory.energy_uj;

  r.speedup = r.digital_memory.time_us / r.hybrid.time_us;
  r.energy_ratio = r.digital_memory.energy_uj / r.hybrid.energy_uj;
  return r;
}

std::vector<SketchBenchRow> sketch_benchmark(const SketchBenchOptions& options) {
  if (options.m_grid.empty() || options.n_grid.empty() || options.ell_grid.empty()) {
    throw std::invalid_argument("sketch benchmark: grids must be nonempty");
  }
  std::vector<SketchBenchRow> rows;
  for (std::size_t n : options.n_grid) {
    for (std::size_t ell : options.ell_grid) {
      for (std::size_t m : options.m_grid) {
        rows.push_back(sketch_bench_point(m, n, ell, options.hybrid, options.digital));
      }
    }
  }
  return rows;
}

void write_sketch_bench_csv(std::ostream& out, const std::vector<SketchBenchRow>& rows) {
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    table.push_back({std::to_string(r.m), std::to_string(r.n), std::to_string(r.ell),
                     format_number(r.hybrid.time_us), format_number(r.hybrid.energy_uj),
                     format_number(r.digital_memory.time_us), format_number(r.digital_memory.energy_uj),
                     format_number(r.digital_flops.time_us), format_number(r.digital_flops.energy_uj),
                     std::to_string(r.flops), format_number(r.speedup), format_number(r.energy_ratio)});
  }
  write_csv(out,
            {"m", "n", "ell", "hybrid_time_us", "hybrid_energy_uj", "digital_memory_time_us",
             "digital_memory_energy_uj", "digital_flops_time_us", "digital_flops_energy_uj", "flops", "speedup",
             "energy_ratio"},
            table);
}

void save_sketch_bench(const std::filesystem::path& dir, const std::vector<SketchBenchRow>& rows) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "sketch_bench.csv", std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + (dir / "sketch_bench.csv").string());
    }
    write_sketch_bench_csv(out, rows);
  }
  // One hybrid and one digital curve per (n, ell) pair.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const SketchBenchRow*>> groups;
  for (const auto& r : rows) {
    groups[{r.n, r.ell}].push_back(&r);
  }
  std::vector<PlotSeries> time_series;
  std::vector<PlotSeries> energy_series;
  for (const auto& [key, group] : groups) {
    const std::string tag = "n=" + std::to_string(key.first) + " l=" + std::to_string(key.second);
    PlotSeries th{"digital " + tag, {}, {}};
    PlotSeries eh{"digital " + tag, {}, {}};
    for (const auto* r : group) {
      th.x.push_back(static_cast<double>(r->m));
      th.y.push_back(r->digital_memory.time_us);
      eh.x.push_back(static_cast<double>(r->m));
      eh.y.push_back(r->digital_memory.energy_uj);
    }
    time_series.push_back(th);
    energy_series.push_back(eh);
  }
  // The hybrid cost does not depend on n or ell.
  PlotSeries ht{"hybrid", {}, {}};
  PlotSeries he{"hybrid", {}, {}};
  if (!groups.empty()) {
    for (const auto* r : groups.begin()->second) {
      ht.x.push_back(static_cast<double>(r->m));
      ht.y.push_back(r->hybrid.time_us);
      he.x.push_back(static_cast<double>(r->m));
      he.y.push_back(r->hybrid.energy_uj);
    }
  }
  time_series.insert(time_series.begin(), ht);
  energy_series.insert(energy_series.begin(), he);
  save_line_chart(dir / "sketch_time.svg", time_series,
                  {"Streaming sketch time", "rows m", "time (us)", true, true, 760, 480});
  save_line_chart(dir / "sketch_energy.svg", energy_series,
                  {"Streaming sketch energy", "rows m", "energy (uJ)", true, true, 760, 480});
}

// ------------------------------------------------------------------ bgsub

double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("relative_difference: shape mismatch");
  }
  const double nb = b.norm();
  return nb == 0.0 ? (a - b).norm() : (a - b).norm() / nb;
}

BgsubResult bgsub_pipeline(const FrameStack& frames, const BgsubOptions& options) {
  frames.validate();
  const std::size_t f = frames.frame_count();
  if (options.pca.k > f) {
    throw std::invalid_argument("bgsub: k = " + std::to_string(options.pca.k) + " exceeds the frame count " +
                                std::to_string(f));
  }
  // pixels x frames, centered over time.
  const Eigen::MatrixXd a = frames.pixels.transpose();
  const Eigen::VectorXd mean = a.rowwise().mean();
  const Eigen::MatrixXd centered = a.colwise() - mean;

  BgsubResult out;
  out.ledger = CostLedger(options.profile);
  if (options.mode == PipelineMode::Digital) {
    out.pca = randomized_pca_digital(centered, options.pca);
  } else {
    AnalogTile tile(static_cast<std::size_t>(centered.rows()), static_cast<std::size_t>(centered.cols()),
                    options.device, io_for(options.mode, options.io), derive_seed(options.pca.seed, 2));
    tile.attach_ledger(out.ledger);
    out.pca = randomized_pca(centered, options.pca, tile);
  }

  const Eigen::MatrixXd& u = out.pca.u_k;
  const Eigen::MatrixXd projected = u * (u.transpose() * centered);
  out.foreground = (centered - projected).transpose();
  out.background = (projected.colwise() + mean).transpose();

  for (std::size_t i = 0; i < f; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double denom = centered.col(r).norm();
    out.residual.push_back(denom == 0.0 ? 0.0 : out.foreground.row(r).norm() / denom);
  }

  const std::string params = "mode=" + std::string(to_string(options.mode)) + ";k=" +
                             std::to_string(options.pca.k) + ";ell=" + std::to_string(options.pca.ell) +
                             ";q=" + std::to_string(options.pca.q);
  auto& rep = out.report;
  const std::uint64_t seed = options.pca.seed;
  rep.add("bgsub", params, "foreground_fraction", out.foreground.norm() / std::max(centered.norm(), 1e-300), seed);
  rep.add("bgsub", params, "mean_frame_residual", mean_of(out.residual), seed);
  for (std::size_t i = 0; i < f; ++i) {
    char name[48];
    std::snprintf(name, sizeof(name), "frame_residual_%04zu", i);
    rep.add("bgsub", params, name, out.residual[i], seed);
  }
  rep.add("bgsub", params, "time_us", out.ledger.time_us(), seed);
  rep.add("bgsub", params, "energy_uj", out.ledger.energy_uj(), seed);
  return out;
}

std::vector<std::vector<bool>> foreground_mask(const Eigen::MatrixXd& foreground, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("foreground_mask: fraction must lie in [0, 1]");
  }
  const double threshold = foreground.size() == 0 ? 0.0 : fraction * foreground.cwiseAbs().maxCoeff();
  std::vector<std::vector<bool>> masks(static_cast<std::size_t>(foreground.rows()));
  for (Eigen::Index r = 0; r < foreground.rows(); ++r) {
    auto& m = masks[static_cast<std::size_t>(r)];
    m.resize(static_cast<std::size_t>(foreground.cols()));
    for (Eigen::Index c = 0; c < foreground.cols(); ++c) {
      m[static_cast<std::size_t>(c)] = std::abs(foreground(r, c)) > threshold;
    }
  }
  return masks;
}

double mask_iou(const std::vector<std::vector<bool>>& predicted, const std::vector<std::vector<bool>>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("mask_iou: frame count mismatch");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t f = 0; f < predicted.size(); ++f) {
    if (predicted[f].size() != truth[f].size()) {
      throw std::invalid_argument("mask_iou: frame size mismatch");
    }
    for (std::size_t i = 0; i < truth[f].size(); ++i) {
      inter += (predicted[f][i] && truth[f][i]) ? 1 : 0;
      uni += (predicted[f][i] || truth[f][i]) ? 1 : 0;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void write_foreground_frames(const std::filesystem::path& dir, const Eigen::MatrixXd& foreground, std::size_t height,
                             std::size_t width) {
  std::filesystem::create_directories(dir);
  const double peak = foreground.cwiseAbs().maxCoeff();
  const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  for (Eigen::Index r = 0; r < foreground.rows(); ++r) {
    char name[32];
    std::snprintf(name, sizeof(name), "fg_%04ld.pgm", static_cast<long>(r));
    const Eigen::RowVectorXd row = foreground.row(r).cwiseAbs() * scale;
    write_pgm(dir / name, unvectorize_frame(row, height, width));
  }
}

// -------------------------------------------------------------- pca study

PcaStudyResult pca_error_study(const Eigen::MatrixXd& a, const PcaStudyOptions& options) {
  if (options.trials < 1) {
    throw std::invalid_argument("pca study: need at least one trial");
  }
  if (options.ell_multipliers.empty()) {
    throw std::invalid_argument("pca study: no sketch sizes");
  }
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());

  PcaStudyResult out;
  out.optimal_error = projection_error(a, exact_truncated_svd(a, options.k).u);

  auto config = [&](std::size_t ell, std::size_t trial) {
    PCAConfig cfg;
    cfg.k = options.k;
    cfg.ell = ell;
    cfg.q = options.q;
    cfg.seed = derive_seed(options.seed, trial);
    return cfg;
  };
  auto summarize = [](PcaStudyRow& row) {
    row.mean = mean_of(row.errors);
    row.median = median_of(row.errors);
  };

  out.digital.ell = options.k;
  for (std::size_t t = 0; t < options.trials; ++t) {
    const PCAResult r = randomized_pca_digital(a, config(options.k, t));
    out.digital.errors.push_back(projection_error(a, r.u_k));
  }
  summarize(out.digital);

  for (std::size_t mult : options.ell_multipliers) {
    PcaStudyRow row;
    row.ell = mult * options.k;
    for (std::size_t t = 0; t < options.trials; ++t) {
      const PCAConfig cfg = config(row.ell, t);
      PCAResult r;
      if (options.mode == PipelineMode::Digital) {
        r = randomized_pca_digital(a, cfg);
      } else {
        AnalogTile tile(m, n, options.device, io_for(options.mode, options.io),
                        derive_seed(cfg.seed, 1000 + row.ell));
        r = randomized_pca(a, cfg, tile);
      }
      row.errors.push_back(projection_error(a, r.u_k));
    }
    summarize(row);
    out.hybrid.push_back(std::move(row));
  }

  auto& rep = out.report;
  const std::string base = "k=" + std::to_string(options.k) + ";q=" + std::to_string(options.q);
  rep.add("pca_study", base, "optimal_error", out.optimal_error, options.seed);
  const std::string dparams = "mode=digital;" + base + ";ell=" + std::to_string(out.digital.ell);
  for (std::size_t t = 0; t < out.digital.errors.size(); ++t) {
    rep.add("pca_study", dparams, "error", out.digital.errors[t], derive_seed(options.seed, t));
  }
  rep.add("pca_study", dparams, "mean_error", out.digital.mean, options.seed);
  rep.add("pca_study", dparams, "median_error", out.digital.median, options.seed);
  for (const auto& row : out.hybrid) {
    char ell[16];
    std::snprintf(ell, sizeof(ell), "%03zu", row.ell);
    const std::string params = "mode=" + std::string(to_string(options.mode)) + ";" + base + ";ell=" + ell;
    for (std::size_t t = 0; t < row.errors.size(); ++t) {
      rep.add("pca_study", params, "error", row.errors[t], derive_seed(options.seed, t));
    }
    rep.add("pca_study", params, "mean_error", row.mean, options.seed);
    rep.add("pca_study", params, "median_error", row.median, options.seed);
  }
  return out;
}

}  // namespace crossbar
