// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crossbar {

/// Simulated time (microseconds) and energy (microjoules).
struct Cost {
  double time_us = 0.0;
  double energy_uj = 0.0;

  Cost& operator+=(const Cost& other) {
    time_us += other.time_us;
    energy_uj += other.energy_uj;
    return *this;
  }
  friend Cost operator+(Cost a, const Cost& b) { return a += b; }
  friend Cost operator*(double k, const Cost& c) { return {k * c.time_us, k * c.energy_uj}; }
};

/// Core primitives of the hybrid accelerator. VectorWrite is the cache
/// transport behind a VWrite and is costed like a vector read.
enum class Primitive : std::uint8_t { MatrixWrite, Mv, Op, VectorWrite, VectorRead, MatrixRead };

inline constexpr std::array<Primitive, 6> kAllPrimitives = {
    Primitive::MatrixWrite, Primitive::Mv,         Primitive::Op,
    Primitive::VectorWrite, Primitive::VectorRead, Primitive::MatrixRead};

std::string_view to_string(Primitive p);

/// Per-primitive constants of a hybrid accelerator built from `m_tiles`
/// crossbar tiles of size `n_tile` x `n_tile`. Times are in microseconds,
/// energies in microjoules.
struct HardwareProfile {
  std::size_t m_tiles = 64;
  std::size_t n_tile = 2048;
  double t_w_us = 1.0;      // per-column array write
  double e_w_uj = 2.0;
  double t_i_us = 0.005;    // order-n vector transport to the cache
  double e_i_uj = 0.001;
  double t_m_us = 0.1;      // analog MV on one tile
  double e_m_uj = 0.2;
  double t_r_us = 0.005;    // pairwise combine of partial results
  double e_r_uj = 0.001;
  double t_o_us = 0.1;      // analog OP update on one tile
  double e_o_uj = 0.2;

  static HardwareProfile low_end();
  static HardwareProfile high_end();
  /// Midpoint of the low and high ranges.
  static HardwareProfile midpoint();

  /// Side length of the largest logical matrix the accelerator holds.
  double logical_dim() const;
  void validate() const;
};

/// Memory-bound model of a digital accelerator (GPU class).
struct DigitalProfile {
  double bandwidth_bytes_per_us = 0.0;
  double energy_per_byte_uj = 0.0;
  double peak_flops = 1e13;
  double precision_bytes = 2.0;
  /// Vector transport terms added to MV/OP rows; taken from the hybrid
  /// profile's t_i and e_i * m.
  double transport_time_us = 0.0;
  double transport_energy_uj = 0.0;
  /// On-chip cache; working sets above it stream through main memory.
  double cache_bytes = 40.0 * 1024 * 1024;

  /// Bandwidth and energy per byte solved so that moving a 16K x 16K
  /// half-precision matrix costs 250 us and 12000 uJ; transport terms
  /// copied from `transport`.
  static DigitalProfile calibrated(const HardwareProfile& transport);
  void validate() const;
};

Cost matrix_write_cost(const HardwareProfile& p);
Cost mv_cost(const HardwareProfile& p);
Cost op_cost(const HardwareProfile& p);
Cost vector_read_cost(const HardwareProfile& p);
Cost matrix_read_cost(const HardwareProfile& p);
Cost hybrid_cost(Primitive primitive, const HardwareProfile& p);

/// Digital cost of a primitive acting on a rows x cols matrix.
Cost digital_cost(Primitive primitive, std::size_t rows, std::size_t cols, const DigitalProfile& p);

/// Accumulates primitive counts and the matching hybrid cost.
class CostLedger {
 public:
  explicit CostLedger(HardwareProfile profile = HardwareProfile::low_end());

  void record(Primitive primitive, std::uint64_t times = 1);

  std::uint64_t count(Primitive primitive) const;
  double time_us() const { return total_.time_us; }
  double energy_uj() const { return total_.energy_uj; }
  Cost total() const { return total_; }
  const HardwareProfile& profile() const { return profile_; }

 private:
  HardwareProfile profile_;
  std::array<std::uint64_t, kAllPrimitives.size()> counts_{};
  Cost total_{};
};

struct LedgerReportRow {
  std::string primitive;
  double count = 0.0;
  Cost hybrid;
  Cost digital;
  std::optional<double> speedup;       // digital time / hybrid time
  std::optional<double> energy_ratio;  // digital energy / hybrid energy
};

/// Hybrid-versus-digital comparison of a ledger: one row per primitive, a
/// total row, and the number of MV products needed to amortize a matrix
/// write. Digital costs are evaluated at the accelerator's logical size.
std::vector<LedgerReportRow> ledger_report(const CostLedger& ledger, const HardwareProfile& hybrid,
                                           const DigitalProfile& digital);

inline constexpr std::string_view kLedgerReportHeader =
    "primitive,count,hybrid_time_us,hybrid_energy_uj,digital_time_us,digital_energy_uj,speedup,"
    "energy_ratio";

void write_ledger_report_csv(std::ostream& out, const std::vector<LedgerReportRow>& rows);

}  // namespace crossbar
