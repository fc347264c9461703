// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end for the crossbar experiments.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crossbar/analog_tile.hpp"
#include "crossbar/config.hpp"
#include "crossbar/cost_model.hpp"
#include "crossbar/datasets.hpp"
#include "crossbar/frames.hpp"
#include "crossbar/matrix_io.hpp"
#include "crossbar/pipelines.hpp"
#include "crossbar/rand_nla.hpp"
#include "crossbar/report.hpp"

namespace fs = std::filesystem;
using namespace crossbar;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  Config config;

  std::uint64_t resolved_seed() const {
    if (seed) {
      return *seed;
    }
    if (const char* env = std::getenv("CROSSBAR_SEED"); env != nullptr && *env != '\0') {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(env, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || env[used] != '\0') {
        throw std::runtime_error(std::string("CROSSBAR_SEED is not an unsigned integer: ") + env);
      }
      return v;
    }
    return 1;
  }

  fs::path out() const {
    fs::create_directories(out_dir);
    return out_dir;
  }
};

const std::vector<std::string> kCommandPrefixes = {"classify.", "sketch.", "pca.", "bgsub.", "olls."};

void load_config(Common& c) {
  if (c.config_path.empty()) {
    return;
  }
  c.config = Config::load(c.config_path);
  const auto unknown = unknown_keys(c.config, kCommandPrefixes);
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) {
      msg += " " + k;
    }
    throw ConfigError(msg);
  }
}

HardwareProfile profile_named(const std::string& name, const Config& cfg) {
  HardwareProfile p;
  if (name == "low") {
    p = HardwareProfile::low_end();
  } else if (name == "mid") {
    p = HardwareProfile::midpoint();
  } else if (name == "high") {
    p = HardwareProfile::high_end();
  } else if (name.empty()) {
    return hardware_profile_from(cfg);
  } else {
    throw std::invalid_argument("unknown profile '" + name + "' (low, mid, high)");
  }
  apply_config(cfg, p);
  return p;
}

void save_report(const ExperimentReport& rep, const fs::path& path) {
  rep.save(path);
  std::cout << "wrote " << path.string() << '\n';
}

// --------------------------------------------------------------- classify

struct ClassifyArgs {
  int pulses = 63;
  std::string mode = "analog";
  std::size_t points = 8192;
  std::uint64_t data_seed = 1;
};

void run_classify(const Common& c, const ClassifyArgs& a) {
  ClassifyOptions opt;
  const auto mode = parse_classify_mode(a.mode);
  if (!mode) {
    throw std::invalid_argument("unknown classify mode '" + a.mode + "'");
  }
  opt.mode = *mode;
  opt.pulses = a.pulses;
  opt.seed = c.resolved_seed();
  apply_config(c.config, opt.device);
  apply_config(c.config, opt.io);
  opt.profile = hardware_profile_from(c.config);
  const CubeDataset ds = gen_cube(a.points, a.data_seed);
  const ClassifyResult r = classify_pipeline(ds, opt);
  std::cout << "accuracy " << format_number(r.accuracy) << "  mean cosine " << format_number(r.mean_cosine)
            << '\n';
  save_report(r.report, c.out() / "classify.csv");
}

// ----------------------------------------------------------- sketch-bench

struct SketchArgs {
  unsigned m_min = 12;
  unsigned m_max = 20;
  std::vector<std::size_t> n{2048, 4096};
  std::vector<std::size_t> ell{256, 512, 1024, 2048};
  std::string profile = "mid";
};

void run_sketch_bench(const Common& c, const SketchArgs& a) {
  SketchBenchOptions opt;
  opt.m_grid = power_grid(a.m_min, a.m_max);
  opt.n_grid = a.n;
  opt.ell_grid = a.ell;
  opt.hybrid = profile_named(a.profile, c.config);
  opt.digital = DigitalProfile::calibrated(opt.hybrid);
  apply_config(c.config, opt.digital);
  const auto rows = sketch_benchmark(opt);
  save_sketch_bench(c.out(), rows);
  for (const auto& r : rows) {
    if (r.m == opt.m_grid.back()) {
      std::cout << "m=" << r.m << " n=" << r.n << " ell=" << r.ell << "  speedup " << format_number(r.speedup)
                << "  energy ratio " << format_number(r.energy_ratio) << '\n';
    }
  }
  std::cout << "wrote " << (c.out() / "sketch_bench.csv").string() << '\n';
}

// ------------------------------------------------------------------- olls

struct OllsArgs {
  std::string input;
  std::string rhs;
  std::size_t ell = 0;
  std::string mode = "analog";
  std::string dist = "gaussian";
  std::optional<int> pulses;
};

void run_olls(const Common& c, const OllsArgs& a) {
  const Eigen::MatrixXd mat = load_matrix(a.input);
  const Eigen::MatrixXd rhs = load_matrix(a.rhs);
  if (rhs.cols() != 1 || rhs.rows() != mat.rows()) {
    throw std::invalid_argument("right-hand side must be a " + std::to_string(mat.rows()) + " x 1 matrix");
  }
  const auto n = static_cast<std::size_t>(mat.cols());
  const Eigen::VectorXd b = rhs.col(0);
  const auto mode = parse_pipeline_mode(a.mode);
  if (!mode) {
    throw std::invalid_argument("unknown mode '" + a.mode + "'");
  }
  SketchConfig cfg;
  cfg.ell = a.ell == 0 ? 4 * (n + 1) : a.ell;
  cfg.seed = c.resolved_seed();
  if (a.dist == "gaussian") {
    cfg.dist = SketchDistribution::Gaussian;
  } else if (a.dist == "rademacher") {
    cfg.dist = SketchDistribution::Rademacher;
  } else {
    throw std::invalid_argument("unknown sketch distribution '" + a.dist + "'");
  }
  apply_config(c.config, cfg.pulses);
  if (a.pulses) {
    cfg.pulses.bl = *a.pulses;
  }

  Eigen::VectorXd x;
  const std::string params = "mode=" + a.mode + ";ell=" + std::to_string(cfg.ell);
  ExperimentReport rep;
  if (*mode == PipelineMode::Digital) {
    const Eigen::MatrixXd s = sketch_matrix(cfg.ell, static_cast<std::size_t>(mat.rows()), cfg.dist, cfg.seed);
    x = solve_least_squares(s * mat, s * b);
  } else {
    DeviceParams device;
    IOParams io;
    apply_config(c.config, device);
    apply_config(c.config, io);
    if (*mode == PipelineMode::IdealAnalog) {
      io = IOParams::ideal();
      cfg.pulses.mode = UpdateMode::Ideal;
    }
    // Typical sketch entries grow like sqrt(rows); keep a 3-sigma margin.
    Eigen::MatrixXd aug(mat.rows(), mat.cols() + 1);
    aug << mat, b;
    const double amax = aug.cwiseAbs().maxCoeff();
    const double smax = cfg.dist == SketchDistribution::Rademacher ? 1.0 : 4.0;
    const double bound = 0.5 * device.w_max;
    cfg.update_scale = amax > 0.0 ? bound / (3.0 * smax * amax * std::sqrt(static_cast<double>(mat.rows()))) : 1.0;
    AnalogTile tile(cfg.ell, n + 1, device, io, derive_seed(cfg.seed, 1));
    CostLedger ledger(hardware_profile_from(c.config));
    tile.attach_ledger(ledger);
    x = sketched_olls(mat, b, cfg, tile);
    rep.add("olls", params, "time_us", ledger.time_us(), cfg.seed);
    rep.add("olls", params, "energy_uj", ledger.energy_uj(), cfg.seed);
  }
  const Eigen::VectorXd x_exact = exact_olls(mat, b);
  const double res = (mat * x - b).norm();
  const double res_exact = (mat * x_exact - b).norm();
  rep.add("olls", params, "residual_norm", res, cfg.seed);
  rep.add("olls", params, "exact_residual_norm", res_exact, cfg.seed);
  rep.add("olls", params, "residual_ratio", res_exact > 0.0 ? res / res_exact : 1.0, cfg.seed);
  rep.add("olls", params, "solution_relative_error", relative_difference(x, x_exact), cfg.seed);
  save_matrix(c.out() / "x.mtx", x);
  std::cout << "residual " << format_number(res) << "  exact " << format_number(res_exact) << '\n';
  save_report(rep, c.out() / "olls.csv");
}

// -------------------------------------------------------------------- pca

struct PcaArgs {
  std::string input;
  std::size_t k = 5;
  std::size_t ell = 15;
  std::size_t q = 2;
  std::string mode = "analog";
};

void run_pca(const Common& c, const PcaArgs& a) {
  const Eigen::MatrixXd mat = load_matrix(a.input);
  const auto mode = parse_pipeline_mode(a.mode);
  if (!mode) {
    throw std::invalid_argument("unknown mode '" + a.mode + "'");
  }
  PCAConfig cfg;
  cfg.k = a.k;
  cfg.ell = a.ell;
  cfg.q = a.q;
  cfg.seed = c.resolved_seed();
  PCAResult r;
  CostLedger ledger(hardware_profile_from(c.config));
  if (*mode == PipelineMode::Digital) {
    r = randomized_pca_digital(mat, cfg);
  } else {
    DeviceParams device;
    IOParams io;
    apply_config(c.config, device);
    apply_config(c.config, io);
    if (*mode == PipelineMode::IdealAnalog) {
      io = IOParams::ideal();
    }
    AnalogTile tile(static_cast<std::size_t>(mat.rows()), static_cast<std::size_t>(mat.cols()), device, io,
                    derive_seed(cfg.seed, 2));
    tile.attach_ledger(ledger);
    r = randomized_pca(mat, cfg, tile);
  }
  const fs::path out = c.out();
  save_matrix(out / "pca_u.mtx", r.u_k);
  save_matrix(out / "pca_sigma.mtx", r.sigma_k);
  save_matrix(out / "pca_v.mtx", r.v_k);
  {
    std::ofstream meta(out / "pca_meta.txt", std::ios::binary);
    meta << "k = " << r.k << "\nell = " << r.ell << "\nq = " << r.power << "\nseed = " << r.seed
         << "\nscale = " << format_number(r.scale) << "\nmode = " << a.mode
         << "\nrank_deficient = " << (r.rank_deficient ? "true" : "false") << '\n';
  }
  ExperimentReport rep;
  const std::string params = "mode=" + a.mode + ";k=" + std::to_string(a.k) + ";ell=" + std::to_string(a.ell) +
                             ";q=" + std::to_string(a.q);
  const double err = projection_error(mat, r.u_k);
  rep.add("pca", params, "relative_error", err, cfg.seed);
  rep.add("pca", params, "time_us", ledger.time_us(), cfg.seed);
  rep.add("pca", params, "energy_uj", ledger.energy_uj(), cfg.seed);
  std::cout << "relative error " << format_number(err) << '\n';
  save_report(rep, out / "pca.csv");
}

// ------------------------------------------------------------------ bgsub

struct BgsubArgs {
  std::string input;
  std::size_t k = 5;
  std::optional<std::size_t> ell;
  std::size_t q = 2;
  std::string mode = "analog";
  bool write_frames = false;
  double threshold = 0.5;
};

void run_bgsub(const Common& c, const BgsubArgs& a) {
  const std::uint64_t seed = c.resolved_seed();
  std::optional<SyntheticVideo> synthetic;
  FrameStack frames;
  if (a.input.empty()) {
    synthetic = moving_square_video(VideoSpec{}, seed);
    frames = synthetic->frames;
  } else {
    frames = load_frames(a.input);
  }
  const auto mode = parse_pipeline_mode(a.mode);
  if (!mode) {
    throw std::invalid_argument("unknown mode '" + a.mode + "'");
  }
  BgsubOptions opt;
  opt.mode = *mode;
  opt.pca.k = a.k;
  opt.pca.ell = a.ell.value_or(3 * a.k);
  opt.pca.q = a.q;
  opt.pca.seed = seed;
  opt.mask_threshold = a.threshold;
  apply_config(c.config, opt.device);
  apply_config(c.config, opt.io);
  opt.profile = hardware_profile_from(c.config);

  BgsubResult r = bgsub_pipeline(frames, opt);
  const fs::path out = c.out();
  const std::string params = "mode=" + a.mode + ";k=" + std::to_string(opt.pca.k) +
                             ";ell=" + std::to_string(opt.pca.ell) + ";q=" + std::to_string(opt.pca.q);
  if (*mode != PipelineMode::Digital) {
    BgsubOptions dopt = opt;
    dopt.mode = PipelineMode::Digital;
    const BgsubResult d = bgsub_pipeline(frames, dopt);
    r.report.add("bgsub", params, "foreground_difference_vs_digital",
                 relative_difference(r.foreground, d.foreground), seed);
  }
  if (synthetic) {
    const double iou = mask_iou(foreground_mask(r.foreground, opt.mask_threshold), synthetic->masks);
    r.report.add("bgsub", params, "mask_iou", iou, seed);
    std::cout << "mask IoU " << format_number(iou) << '\n';
  }
  if (a.write_frames) {
    write_foreground_frames(out / "foreground", r.foreground, frames.height, frames.width);
  }
  save_report(r.report, out / "bgsub.csv");
}

// -------------------------------------------------------------- pca-study

struct StudyArgs {
  std::string input;
  std::size_t k = 5;
  std::size_t q = 2;
  std::size_t trials = 10;
  std::string mode = "analog";
  double target_error = 0.125;
  std::size_t rows = 1966;
  std::size_t cols = 53;
};

void run_pca_study(const Common& c, const StudyArgs& a) {
  const std::uint64_t seed = c.resolved_seed();
  Eigen::MatrixXd mat;
  if (a.input.empty()) {
    mat = genetics_like_matrix(a.rows, a.cols, a.k, a.target_error, seed);
  } else {
    mat = load_matrix(a.input);
  }
  const auto mode = parse_pipeline_mode(a.mode);
  if (!mode) {
    throw std::invalid_argument("unknown mode '" + a.mode + "'");
  }
  PcaStudyOptions opt;
  opt.k = a.k;
  opt.q = a.q;
  opt.trials = a.trials;
  opt.seed = seed;
  opt.mode = *mode;
  apply_config(c.config, opt.device);
  apply_config(c.config, opt.io);
  const PcaStudyResult r = pca_error_study(mat, opt);

  std::vector<std::string> header{"matrix_size", "optimal", "digital_ell_k"};
  std::vector<std::string> row{std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()),
                               format_number(r.optimal_error), format_number(r.digital.mean)};
  for (const auto& h : r.hybrid) {
    header.push_back(std::string(to_string(*mode)) + "_ell_" + std::to_string(h.ell));
    row.push_back(format_number(h.mean));
  }
  const fs::path out = c.out();
  save_csv(out / "pca_table.csv", header, {row});
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::cout << header[i] << ' ' << row[i] << '\n';
  }
  save_report(r.report, out / "pca_study.csv");
}

// ------------------------------------------------------------ cost-report

void run_cost_report(const Common& c, const std::string& profile_name) {
  const HardwareProfile p = profile_named(profile_name, c.config);
  p.validate();
  DigitalProfile d = DigitalProfile::calibrated(p);
  apply_config(c.config, d);
  const auto dim = static_cast<std::size_t>(p.logical_dim());
  std::vector<std::vector<std::string>> rows;
  for (Primitive prim : kAllPrimitives) {
    const Cost h = hybrid_cost(prim, p);
    const Cost g = digital_cost(prim, dim, dim, d);
    rows.push_back({std::string(to_string(prim)), format_number(h.time_us), format_number(h.energy_uj),
                    format_number(g.time_us), format_number(g.energy_uj)});
  }
  const std::vector<std::string> header{"primitive", "hybrid_time_us", "hybrid_energy_uj", "digital_time_us",
                                        "digital_energy_uj"};
  write_csv(std::cout, header, rows);
  save_csv(c.out() / "cost_report.csv", header, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analog crossbar simulator and randomized linear algebra experiments"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--seed", common.seed, "seed (default: $CROSSBAR_SEED or 1)");

  std::function<void()> action;

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "streamed sketch classification of the cube dataset");
  classify->add_option("--pulses", ca.pulses, "pulse train length")->check(CLI::PositiveNumber);
  classify->add_option("--mode", ca.mode, "analog | ideal-analog | digital-streaming | digital-baseline");
  classify->add_option("--points", ca.points, "dataset size (even)");
  classify->add_option("--data-seed", ca.data_seed, "dataset seed");
  classify->callback([&] { action = [&] { run_classify(common, ca); }; });

  SketchArgs sa;
  auto* sketch = app.add_subcommand("sketch-bench", "hybrid vs digital cost of streamed sketching");
  sketch->add_option("--m-min", sa.m_min, "smallest log2(m)");
  sketch->add_option("--m-max", sa.m_max, "largest log2(m)");
  sketch->add_option("--n", sa.n, "column counts")->delimiter(',');
  sketch->add_option("--ell", sa.ell, "sketch sizes")->delimiter(',');
  sketch->add_option("--profile", sa.profile, "low | mid | high");
  sketch->callback([&] { action = [&] { run_sketch_bench(common, sa); }; });

  OllsArgs oa;
  auto* olls = app.add_subcommand("olls", "sketch-and-solve least squares");
  olls->add_option("--input", oa.input, "matrix file A")->required()->check(CLI::ExistingFile);
  olls->add_option("--rhs", oa.rhs, "matrix file b (rows x 1)")->required()->check(CLI::ExistingFile);
  olls->add_option("--ell", oa.ell, "sketch size (default 4(n+1))");
  olls->add_option("--mode", oa.mode, "digital | ideal-analog | analog");
  olls->add_option("--dist", oa.dist, "gaussian | rademacher");
  olls->add_option("--pulses", oa.pulses, "pulse train length");
  olls->callback([&] { action = [&] { run_olls(common, oa); }; });

  PcaArgs pa;
  auto* pca = app.add_subcommand("pca", "randomized PCA of a matrix file");
  pca->add_option("--input", pa.input, "matrix file")->required()->check(CLI::ExistingFile);
  pca->add_option("--k", pa.k, "components");
  pca->add_option("--ell", pa.ell, "sketch size");
  pca->add_option("--q", pa.q, "power iterations");
  pca->add_option("--mode", pa.mode, "digital | ideal-analog | analog");
  pca->callback([&] { action = [&] { run_pca(common, pa); }; });

  BgsubArgs ba;
  auto* bgsub = app.add_subcommand("bgsub", "PCA background subtraction");
  bgsub->add_option("--input", ba.input, "PGM directory or .bin frames (default: synthetic video)")
      ->check(CLI::ExistingPath);
  bgsub->add_option("--k", ba.k, "components");
  bgsub->add_option("--ell", ba.ell, "sketch size (default 3k)");
  bgsub->add_option("--q", ba.q, "power iterations");
  bgsub->add_option("--mode", ba.mode, "digital | ideal-analog | analog");
  bgsub->add_option("--threshold", ba.threshold, "mask threshold as a fraction of max |foreground|");
  bgsub->add_flag("--write-frames", ba.write_frames, "write foreground frames as PGM");
  bgsub->callback([&] { action = [&] { run_bgsub(common, ba); }; });

  StudyArgs st;
  auto* study = app.add_subcommand("pca-study", "PCA error versus sketch size");
  study->add_option("--input", st.input, "matrix file (default: spectrum-matched synthetic)")
      ->check(CLI::ExistingFile);
  study->add_option("--k", st.k, "components");
  study->add_option("--q", st.q, "power iterations");
  study->add_option("--trials", st.trials, "trials per sketch size");
  study->add_option("--mode", st.mode, "digital | ideal-analog | analog");
  study->add_option("--target-error", st.target_error, "optimal rank-k error of the synthetic matrix");
  study->callback([&] { action = [&] { run_pca_study(common, st); }; });

  std::string profile_name;
  auto* cost = app.add_subcommand("cost-report", "primitive cost table");
  cost->add_option("--profile", profile_name, "low | mid | high (default: config or low)");
  cost->callback([&] { action = [&] { run_cost_report(common, profile_name); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    load_config(common);
    action();
  } catch (const std::exception& e) {
    std::cerr << "crossbar: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
