// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/cost_model.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace crossbar {

namespace {

std::size_t index_of(Primitive p) { return static_cast<std::size_t>(p); }

// 16K x 16K half-precision matrix: the reference transfer behind the
// published digital numbers.
constexpr double kReferenceBytes = 2.0 * 16384.0 * 16384.0;
constexpr double kReferenceTimeUs = 250.0;
constexpr double kReferenceEnergyUj = 12000.0;

double log2_tiles(const HardwareProfile& p) {
  if (p.m_tiles == 0 || !std::has_single_bit(p.m_tiles)) {
    throw std::invalid_argument("tile count must be a positive power of two");
  }
  return static_cast<double>(std::countr_zero(p.m_tiles));
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << *v;
  } else {
    out << "NA";
  }
}

}  // namespace

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::MatrixWrite: return "matrix_write";
    case Primitive::Mv: return "mv";
    case Primitive::Op: return "op";
    case Primitive::VectorWrite: return "vector_write";
    case Primitive::VectorRead: return "vector_read";
    case Primitive::MatrixRead: return "matrix_read";
  }
  return "unknown";
}

HardwareProfile HardwareProfile::low_end() { return HardwareProfile{}; }

HardwareProfile HardwareProfile::high_end() {
  HardwareProfile p;
  p.t_w_us = 10.0;
  p.e_w_uj = 100.0;
  p.t_i_us = 0.020;
  p.e_i_uj = 0.010;
  p.t_m_us = 0.1;
  p.e_m_uj = 0.5;
  p.t_r_us = 0.020;
  p.e_r_uj = 0.010;
  p.t_o_us = 0.1;
  p.e_o_uj = 0.5;
  return p;
}

HardwareProfile HardwareProfile::midpoint() {
  const HardwareProfile lo = low_end();
  const HardwareProfile hi = high_end();
  auto mid = [](double a, double b) { return 0.5 * (a + b); };
  HardwareProfile p = lo;
  p.t_w_us = mid(lo.t_w_us, hi.t_w_us);
  p.e_w_uj = mid(lo.e_w_uj, hi.e_w_uj);
  p.t_i_us = mid(lo.t_i_us, hi.t_i_us);
  p.e_i_uj = mid(lo.e_i_uj, hi.e_i_uj);
  p.t_m_us = mid(lo.t_m_us, hi.t_m_us);
  p.e_m_uj = mid(lo.e_m_uj, hi.e_m_uj);
  p.t_r_us = mid(lo.t_r_us, hi.t_r_us);
  p.e_r_uj = mid(lo.e_r_uj, hi.e_r_uj);
  p.t_o_us = mid(lo.t_o_us, hi.t_o_us);
  p.e_o_uj = mid(lo.e_o_uj, hi.e_o_uj);
  return p;
}

double HardwareProfile::logical_dim() const {
  return static_cast<double>(n_tile) * std::sqrt(static_cast<double>(m_tiles));
}

void HardwareProfile::validate() const {
  if (n_tile == 0) {
    throw std::invalid_argument("tile dimension must be positive");
  }
  log2_tiles(*this);
  for (double v : {t_w_us, e_w_uj, t_i_us, e_i_uj, t_m_us, e_m_uj, t_r_us, e_r_uj, t_o_us, e_o_uj}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("hardware profile times and energies must be positive");
    }
  }
}

DigitalProfile DigitalProfile::calibrated(const HardwareProfile& transport) {
  DigitalProfile d;
  d.bandwidth_bytes_per_us = kReferenceBytes / kReferenceTimeUs;
  d.energy_per_byte_uj = kReferenceEnergyUj / kReferenceBytes;
  d.transport_time_us = transport.t_i_us;
  d.transport_energy_uj = transport.e_i_uj * static_cast<double>(transport.m_tiles);
  return d;
}

void DigitalProfile::validate() const {
  for (double v : {bandwidth_bytes_per_us, energy_per_byte_uj, peak_flops, precision_bytes, cache_bytes}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("digital profile fields must be positive");
    }
  }
  if (transport_time_us < 0.0 || transport_energy_uj < 0.0) {
    throw std::invalid_argument("digital transport terms must be nonnegative");
  }
}

Cost matrix_write_cost(const HardwareProfile& p) {
  const auto n = static_cast<double>(p.n_tile);
  const auto m = static_cast<double>(p.m_tiles);
  return {p.t_w_us * n, p.e_w_uj * n * m};
}

Cost mv_cost(const HardwareProfile& p) {
  const auto m = static_cast<double>(p.m_tiles);
  return {p.t_i_us + p.t_m_us + p.t_r_us * log2_tiles(p), (p.e_i_uj + p.e_m_uj + p.e_r_uj) * m};
}

Cost op_cost(const HardwareProfile& p) {
  const auto m = static_cast<double>(p.m_tiles);
  return {2.0 * p.t_i_us + p.t_o_us, (2.0 * p.e_i_uj + p.e_o_uj) * m};
}

Cost vector_read_cost(const HardwareProfile& p) {
  log2_tiles(p);
  return {p.t_i_us, p.e_i_uj * static_cast<double>(p.m_tiles)};
}

Cost matrix_read_cost(const HardwareProfile& p) {
  const double columns = p.logical_dim();
  const Cost mv = mv_cost(p);
  const Cost vr = vector_read_cost(p);
  return {columns * (mv.time_us + vr.time_us), columns * (mv.energy_uj + vr.energy_uj)};
}

Cost hybrid_cost(Primitive primitive, const HardwareProfile& p) {
  switch (primitive) {
    case Primitive::MatrixWrite: return matrix_write_cost(p);
    case Primitive::Mv: return mv_cost(p);
    case Primitive::Op: return op_cost(p);
    case Primitive::VectorWrite:
    case Primitive::VectorRead: return vector_read_cost(p);
    case Primitive::MatrixRead: return matrix_read_cost(p);
  }
  throw std::invalid_argument("unknown primitive");
}

Cost digital_cost(Primitive primitive, std::size_t rows, std::size_t cols, const DigitalProfile& p) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("digital cost needs nonzero dimensions");
  }
  const double bytes = p.precision_bytes * static_cast<double>(rows) * static_cast<double>(cols);
  const Cost matrix{bytes / p.bandwidth_bytes_per_us, bytes * p.energy_per_byte_uj};
  const Cost transport{p.transport_time_us, p.transport_energy_uj};
  switch (primitive) {
    case Primitive::MatrixWrite:
    case Primitive::MatrixRead: return matrix;
    case Primitive::Mv: return matrix + transport;
    case Primitive::Op: return matrix + 2.0 * transport;
    case Primitive::VectorWrite:
    case Primitive::VectorRead: return transport;
  }
  throw std::invalid_argument("unknown primitive");
}

CostLedger::CostLedger(HardwareProfile profile) : profile_(profile) { profile_.validate(); }

void CostLedger::record(Primitive primitive, std::uint64_t times) {
  counts_[index_of(primitive)] += times;
  total_ += static_cast<double>(times) * hybrid_cost(primitive, profile_);
}

std::uint64_t CostLedger::count(Primitive primitive) const { return counts_[index_of(primitive)]; }

std::vector<LedgerReportRow> ledger_report(const CostLedger& ledger, const HardwareProfile& hybrid,
                                           const DigitalProfile& digital) {
  hybrid.validate();
  digital.validate();
  const auto dim = static_cast<std::size_t>(std::llround(hybrid.logical_dim()));

  auto ratio = [](double num, double den) -> std::optional<double> {
    if (den > 0.0) {
      return num / den;
    }
    return std::nullopt;
  };

  std::vector<LedgerReportRow> rows;
  LedgerReportRow total{"total", 0.0, {}, {}, {}, {}};
  for (Primitive p : kAllPrimitives) {
    const auto n = static_cast<double>(ledger.count(p));
    LedgerReportRow row;
    row.primitive = std::string(to_string(p));
    row.count = n;
    row.hybrid = n * hybrid_cost(p, hybrid);
    row.digital = n * digital_cost(p, dim, dim, digital);
    row.speedup = ratio(row.digital.time_us, row.hybrid.time_us);
    row.energy_ratio = ratio(row.digital.energy_uj, row.hybrid.energy_uj);
    total.count += n;
    total.hybrid += row.hybrid;
    total.digital += row.digital;
    rows.push_back(row);
  }
  total.speedup = ratio(total.digital.time_us, total.hybrid.time_us);
  total.energy_ratio = ratio(total.digital.energy_uj, total.hybrid.energy_uj);
  rows.push_back(total);

  // Smallest k with T_MW + k T_MV <= k T^d_MV.
  if (ledger.count(Primitive::MatrixWrite) > 0) {
    const Cost write = matrix_write_cost(hybrid);
    const Cost mv = mv_cost(hybrid);
    const Cost mv_digital = digital_cost(Primitive::Mv, dim, dim, digital);
    const double gain = mv_digital.time_us - mv.time_us;
    if (gain > 0.0) {
      const double k = std::ceil(write.time_us / gain);
      LedgerReportRow amortize;
      amortize.primitive = "mv_amortizing_matrix_write";
      amortize.count = k;
      amortize.hybrid = write + k * mv;
      amortize.digital = k * mv_digital;
      amortize.speedup = ratio(amortize.digital.time_us, amortize.hybrid.time_us);
      amortize.energy_ratio = ratio(amortize.digital.energy_uj, amortize.hybrid.energy_uj);
      rows.push_back(amortize);
    }
  }
  return rows;
}

void write_ledger_report_csv(std::ostream& out, const std::vector<LedgerReportRow>& rows) {
  const auto old_precision = out.precision(12);
  out << kLedgerReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.primitive << ',' << r.count << ',' << r.hybrid.time_us << ',' << r.hybrid.energy_uj << ','
        << r.digital.time_us << ',' << r.digital.energy_uj << ',';
    write_optional(out, r.speedup);
    out << ',';
    write_optional(out, r.energy_ratio);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace crossbar
