// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion (with
// sub-check lines above it) and exits nonzero if any selected criterion
// fails. Usage: crossbar_acceptance [--criterion N]

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "crossbar/analog_tile.hpp"
#include "crossbar/cost_model.hpp"
#include "crossbar/datasets.hpp"
#include "crossbar/pipelines.hpp"
#include "crossbar/rand_nla.hpp"

using namespace crossbar;

namespace {

class Checker {
 public:
  void check(bool ok, const std::string& what) {
    std::printf("    %s %s\n", ok ? "ok  " : "FAIL", what.c_str());
    all_ &= ok;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

bool rel_close(double got, double want, double tol = 1e-9) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      m(i, j) = nd(rng);
    }
  }
  return m;
}

double rel_fro(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double d = want.norm();
  return d == 0.0 ? got.norm() : (got - want).norm() / d;
}

// 1 ---------------------------------------------------------------------
void criterion1(Checker& c) {
  const HardwareProfile lo = HardwareProfile::low_end();
  const HardwareProfile hi = HardwareProfile::high_end();
  struct Row {
    const char* name;
    double got_lo, got_hi, want_lo, want_hi;
  };
  const DigitalProfile dlo = DigitalProfile::calibrated(lo);
  const DigitalProfile dhi = DigitalProfile::calibrated(hi);
  const std::size_t dim = 16384;
  const std::vector<Row> rows = {
      {"T_MW", matrix_write_cost(lo).time_us, matrix_write_cost(hi).time_us, 2048, 20480},
      {"T_MV", mv_cost(lo).time_us, mv_cost(hi).time_us, 0.135, 0.240},
      {"E_MV", mv_cost(lo).energy_uj, mv_cost(hi).energy_uj, 12.928, 33.28},
      {"T_OP", op_cost(lo).time_us, op_cost(hi).time_us, 0.11, 0.14},
      {"T_RM", matrix_read_cost(lo).time_us, matrix_read_cost(hi).time_us, 2293.76, 4259.84},
      {"E_RM", matrix_read_cost(lo).energy_uj, matrix_read_cost(hi).energy_uj, 212860.928, 555745.28},
      {"digital T_MW", digital_cost(Primitive::MatrixWrite, dim, dim, dlo).time_us,
       digital_cost(Primitive::MatrixWrite, dim, dim, dhi).time_us, 250, 250},
      {"digital E_MW", digital_cost(Primitive::MatrixWrite, dim, dim, dlo).energy_uj,
       digital_cost(Primitive::MatrixWrite, dim, dim, dhi).energy_uj, 12000, 12000},
      {"digital T_MV", digital_cost(Primitive::Mv, dim, dim, dlo).time_us,
       digital_cost(Primitive::Mv, dim, dim, dhi).time_us, 250.005, 250.02},
      {"digital E_MV", digital_cost(Primitive::Mv, dim, dim, dlo).energy_uj,
       digital_cost(Primitive::Mv, dim, dim, dhi).energy_uj, 12000.064, 12000.64},
      {"digital T_OP", digital_cost(Primitive::Op, dim, dim, dlo).time_us,
       digital_cost(Primitive::Op, dim, dim, dhi).time_us, 250.01, 250.04},
      {"digital E_OP", digital_cost(Primitive::Op, dim, dim, dlo).energy_uj,
       digital_cost(Primitive::Op, dim, dim, dhi).energy_uj, 12000.128, 12001.28},
      {"digital T_RM", digital_cost(Primitive::MatrixRead, dim, dim, dlo).time_us,
       digital_cost(Primitive::MatrixRead, dim, dim, dhi).time_us, 250, 250},
      {"digital E_RM", digital_cost(Primitive::MatrixRead, dim, dim, dlo).energy_uj,
       digital_cost(Primitive::MatrixRead, dim, dim, dhi).energy_uj, 12000, 12000},
  };
  for (const auto& r : rows) {
    c.check(rel_close(r.got_lo, r.want_lo) && rel_close(r.got_hi, r.want_hi),
            fmt("%-13s [%.12g, %.12g] want [%.12g, %.12g]", r.name, r.got_lo, r.got_hi, r.want_lo, r.want_hi));
  }
}

// 2 ---------------------------------------------------------------------
void criterion2(Checker& c) {
  const CubeDataset ds = gen_cube(8192, 1);
  c.check(ds.train.size() == 4096 && ds.test.size() == 4096, "4096 train / 4096 test");

  ClassifyOptions opt;
  opt.mode = ClassifyMode::DigitalBaseline;
  const double baseline = classify_pipeline(ds, opt).accuracy;
  c.check(std::abs(baseline - 0.9833) <= 0.01, fmt("digital baseline accuracy %.4f in 0.9833 +- 0.01", baseline));

  std::vector<double> streaming;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    opt.mode = ClassifyMode::DigitalStreaming;
    opt.seed = s;
    streaming.push_back(classify_pipeline(ds, opt).accuracy);
  }
  const double ms = median_of(streaming);
  c.check(std::abs(ms - 0.9631) <= 0.02, fmt("digital streaming median accuracy %.4f in 0.9631 +- 0.02", ms));

  std::vector<double> medians;
  for (int pulses : {15, 31, 63}) {
    std::vector<double> acc;
    for (std::uint64_t s = 1; s <= 10; ++s) {
      opt.mode = ClassifyMode::Analog;
      opt.pulses = pulses;
      opt.seed = s;
      acc.push_back(classify_pipeline(ds, opt).accuracy);
    }
    medians.push_back(median_of(acc));
    std::printf("    info analog pulses=%d median accuracy %.4f\n", pulses, medians.back());
  }
  c.check(medians[0] < medians[1] && medians[1] < medians[2],
          fmt("analog accuracy increases over pulses 15/31/63: %.4f < %.4f < %.4f", medians[0], medians[1],
              medians[2]));
  c.check(medians[2] >= 0.90, fmt("analog accuracy at 63 pulses %.4f >= 0.90", medians[2]));
}

// 3 ---------------------------------------------------------------------
void criterion3(Checker& c) {
  SketchBenchOptions opt;
  opt.m_grid = power_grid(12, 20);
  const auto rows = sketch_benchmark(opt);
  const std::size_t m_max = opt.m_grid.back();
  const std::size_t ell_max = opt.ell_grid.back();
  bool flops_ok = true;
  for (const auto& r : rows) {
    const std::uint64_t want = static_cast<std::uint64_t>(r.ell) * r.n * (2 * static_cast<std::uint64_t>(r.m) - 1);
    flops_ok &= r.flops == want;
    if (r.m == m_max && r.ell == ell_max) {
      c.check(r.speedup >= 15.0, fmt("n=%zu ell=%zu m=%zu speedup %.2f >= 15", r.n, r.ell, r.m, r.speedup));
      c.check(r.energy_ratio >= 8.0,
              fmt("n=%zu ell=%zu m=%zu energy ratio %.2f >= 8", r.n, r.ell, r.m, r.energy_ratio));
    }
  }
  c.check(flops_ok, fmt("flop counts equal ell*n*(2m-1) at all %zu grid points", rows.size()));
}

// 4 ---------------------------------------------------------------------
void criterion4(Checker& c) {
  const Eigen::MatrixXd a = genetics_like_matrix(1966, 53, 5, 0.125, 7);
  PcaStudyOptions opt;
  const PcaStudyResult r = pca_error_study(a, opt);
  std::printf("    info optimal %.4f digital(ell=k) median %.4f\n", r.optimal_error, r.digital.median);
  for (const auto& h : r.hybrid) {
    std::printf("    info hybrid ell=%zu median %.4f mean %.4f\n", h.ell, h.median, h.mean);
  }
  const double d3 = std::abs(r.hybrid[2].median - r.digital.median);
  c.check(d3 <= 0.03, fmt("|hybrid(3k) - digital| = %.4f <= 0.03", d3));
  c.check(r.hybrid[0].median >= r.hybrid[1].median && r.hybrid[1].median >= r.hybrid[2].median,
          "hybrid median error nonincreasing in ell");
}

// 5 ---------------------------------------------------------------------
void criterion5(Checker& c) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> rows_d(8, 128);
  double worst_tile = 0.0;
  double worst_sketch = 0.0;
  double worst_olls = 0.0;
  double worst_pca = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int m = rows_d(rng);
    const int n = std::uniform_int_distribution<int>(2, std::min(64, m))(rng);
    const Eigen::MatrixXd a = gaussian(rng, m, n);
    const Eigen::VectorXd x = gaussian(rng, n, 1);
    const Eigen::VectorXd y = gaussian(rng, m, 1);
    const Eigen::VectorXd u = gaussian(rng, m, 1);
    const Eigen::VectorXd v = gaussian(rng, n, 1);
    const TileScaling s = scale_for_tile(a, 1.0);

    AnalogTile tile(m, n, DeviceParams{}, IOParams::ideal(), 100 + t);
    tile.load(s.scaled);
    worst_tile = std::max(worst_tile, rel_fro(tile.mv(x), s.scaled * x));
    worst_tile = std::max(worst_tile, rel_fro(tile.mv_transpose(y), s.scaled.transpose() * y));
    worst_tile = std::max(worst_tile, rel_fro(tile.read(), s.scaled));
    PulseConfig ideal{31, UpdateMode::Ideal};
    tile.update(0.01 * u, 0.01 * v, ideal);
    worst_tile = std::max(worst_tile, rel_fro(tile.weights(), s.scaled + 1e-4 * u * v.transpose()));

    // Streamed sketch and sketched least squares.
    const std::size_t ell = static_cast<std::size_t>(n) + 1 + static_cast<std::size_t>(t % 7);
    SketchConfig cfg;
    cfg.ell = ell;
    cfg.pulses = ideal;
    cfg.seed = 500 + t;
    cfg.dist = t % 2 == 0 ? SketchDistribution::Gaussian : SketchDistribution::Rademacher;
    cfg.update_scale = 1e-3;
    const Eigen::MatrixXd smat = sketch_matrix(ell, m, cfg.dist, cfg.seed);
    AnalogTile sk_tile(ell, n, DeviceParams{}, IOParams::ideal(), 200 + t);
    worst_sketch = std::max(worst_sketch, rel_fro(sketch_stream(rows_of(a), cfg, sk_tile).z, smat * a));
    if (static_cast<int>(ell) <= m) {
      const Eigen::MatrixXd a2 = a.leftCols(n - 1);
      const Eigen::VectorXd b = a.col(n - 1);
      AnalogTile ls_tile(ell, n, DeviceParams{}, IOParams::ideal(), 300 + t);
      const Eigen::VectorXd got = sketched_olls(a2, b, cfg, ls_tile);
      const Eigen::VectorXd want = (smat * a2).colPivHouseholderQr().solve(smat * b);
      worst_olls = std::max(worst_olls, rel_fro(got, want));
    }

    // Randomized PCA: ideal tile against the digital oracle with the same R.
    PCAConfig pc;
    pc.k = std::min<std::size_t>(3, n);
    pc.ell = std::min<std::size_t>(pc.k + 2, n);
    pc.q = 1 + t % 2;
    pc.seed = 900 + t;
    AnalogTile pca_tile(m, n, DeviceParams{}, IOParams::ideal(), 400 + t);
    const PCAResult h = randomized_pca(a, pc, pca_tile);
    const PCAResult d = randomized_pca_digital(a, pc);
    worst_pca = std::max(worst_pca, rel_fro(h.u_k * h.sigma_k.asDiagonal() * h.v_k.transpose(),
                                            d.u_k * d.sigma_k.asDiagonal() * d.v_k.transpose()));
  }
  c.check(worst_tile <= 1e-10, fmt("ideal tile mv / mv^T / read / update, worst rel err %.3g", worst_tile));
  c.check(worst_sketch <= 1e-10, fmt("streamed sketch vs S A, worst rel err %.3g", worst_sketch));
  c.check(worst_olls <= 1e-10, fmt("sketched least squares vs dense solve, worst rel err %.3g", worst_olls));
  c.check(worst_pca <= 1e-10, fmt("randomized PCA vs digital oracle, worst rel err %.3g", worst_pca));
}

// 6 ---------------------------------------------------------------------
void criterion6(Checker& c) {
  {
    DeviceParams dev;
    dev.d2d_std = 0.0;
    dev.asym_std = 0.0;
    AnalogTile tile(4, 5, dev, IOParams{}, 11);
    Eigen::VectorXd u(4);
    u << 0.4, -0.2, 0.1, -0.35;
    Eigen::VectorXd v(5);
    v << 0.05, -0.03, 0.02, 0.06, -0.01;
    u *= 0.1;
    const Eigen::MatrixXd want = u * v.transpose();
    const int trials = 20000;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 5);
    Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(4, 5);
    for (int t = 0; t < trials; ++t) {
      tile.reset();
      tile.update(u, v, PulseConfig{31, UpdateMode::Stochastic});
      sum += tile.weights();
      sum2 += tile.weights().cwiseAbs2();
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) {
        const double mean = sum(i, j) / trials;
        const double var = sum2(i, j) / trials - mean * mean;
        const double se = std::sqrt(var * trials / (trials - 1.0) / trials);
        worst = std::max(worst, std::abs(mean - want(i, j)) / se);
      }
    }
    c.check(tile.saturation_count() == 0, "no clamped pulse probabilities in the OP trial");
    c.check(worst <= 4.0, fmt("OP update mean within %.2f SE of u v^T (limit 4)", worst));
  }
  {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd w = 0.4 * Eigen::MatrixXd::Random(6, 8);
    Eigen::VectorXd x(8);
    // Inputs on the 7-bit grid after noise management.
    x << 1.0, -21.0 / 63.0, 40.0 / 63.0, 0.0, -1.0, 7.0 / 63.0, -50.0 / 63.0, 13.0 / 63.0;
    x *= 0.8;
    AnalogTile tile(6, 8, DeviceParams{}, IOParams{}, 12);
    tile.load(w);
    const Eigen::VectorXd want = w * x;
    const int trials = 10000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(6);
    Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(6);
    for (int t = 0; t < trials; ++t) {
      const Eigen::VectorXd y = tile.mv(x);
      sum += y;
      sum2 += y.cwiseAbs2();
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 6; ++i) {
      const double mean = sum(i) / trials;
      const double var = sum2(i) / trials - mean * mean;
      worst = std::max(worst, std::abs(mean - want(i)) / std::sqrt(var / trials));
    }
    c.check(worst <= 3.0, fmt("MV mean within %.2f SE of W x (limit 3)", worst));
  }
  {
    AnalogTile tile(2, 40, DeviceParams{}, IOParams{}, 13);
    Eigen::MatrixXd w(2, 40);
    w.row(0).setConstant(1.0);
    w.row(1).setConstant(-1.0);
    tile.load(w);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(40);
    bool exact = true;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd y = tile.mv(ones);
      exact &= y(0) == 20.0 && y(1) == -20.0;
    }
    c.check(exact, "outputs clip at exactly +-20 w_max");
    Eigen::VectorXd half = Eigen::VectorXd::Zero(40);
    half.head(10).setConstant(1.0);
    double peak = 0.0;
    for (int t = 0; t < 1000; ++t) {
      peak = std::max(peak, tile.mv(half).cwiseAbs().maxCoeff());
    }
    c.check(peak < 20.0, fmt("unsaturated outputs stay inside the bound (max %.3f)", peak));
  }
}

// 7 ---------------------------------------------------------------------
void criterion7(Checker& c) {
  std::vector<double> iou;
  std::vector<double> diff;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const SyntheticVideo video = moving_square_video(VideoSpec{}, s);
    BgsubOptions opt;
    opt.pca.k = 5;
    opt.pca.ell = 15;
    opt.pca.q = 2;
    opt.pca.seed = s;
    opt.mode = PipelineMode::Digital;
    const BgsubResult d = bgsub_pipeline(video.frames, opt);
    opt.mode = PipelineMode::Analog;
    const BgsubResult h = bgsub_pipeline(video.frames, opt);
    iou.push_back(mask_iou(foreground_mask(d.foreground, opt.mask_threshold), video.masks));
    diff.push_back(relative_difference(h.foreground, d.foreground));
    std::printf("    info seed %llu IoU %.4f hybrid-vs-digital %.4f\n", static_cast<unsigned long long>(s),
                iou.back(), diff.back());
  }
  const double mi = median_of(iou);
  const double md = median_of(diff);
  c.check(mi >= 0.8, fmt("digital foreground mask IoU median %.4f >= 0.8", mi));
  c.check(md <= 0.15, fmt("hybrid vs digital foreground relative difference median %.4f <= 0.15", md));
}

// 8 ---------------------------------------------------------------------
void criterion8(Checker& c) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd a = gaussian(rng, 1024, 8);
  std::vector<double> medians;
  for (std::size_t ell : {64, 128, 256, 512}) {
    const DistortionStats st = embedding_distortion(a, gaussian_sketch_apply(ell, 1000 * ell), 200);
    medians.push_back(st.median);
    std::printf("    info ell=%zu median distortion %.4f\n", ell, st.median);
  }
  c.check(medians[2] <= 0.5, fmt("median distortion at ell=256: %.4f <= 0.5", medians[2]));
  bool dec = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    dec &= medians[i] < medians[i - 1];
  }
  c.check(dec, "median distortion decreases as ell doubles (64, 128, 256, 512)");
}

struct Criterion {
  const char* title;
  double budget_s;
  std::function<void(Checker&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"cost-table reproduction", 1.0, criterion1},
      {"classification experiment", 120.0, criterion2},
      {"streaming benchmark claim", 60.0, criterion3},
      {"PCA residual trend", 120.0, criterion4},
      {"oracle equivalence", 30.0, criterion5},
      {"noise-model statistics", 60.0, criterion6},
      {"background subtraction", 60.0, criterion7},
      {"embedding property", 30.0, criterion8},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) {
      continue;
    }
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(secs < criteria[i].budget_s, fmt("runtime %.2f s < %.0f s", secs, criteria[i].budget_s));
    std::printf("[%s] criterion %zu: %s\n", c.all() ? "PASS" : "FAIL", i + 1, criteria[i].title);
    all &= c.all();
  }
  return all ? 0 : 1;
}
