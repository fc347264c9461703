// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace crossbar {

/// Formats a value with 10 significant digits, "NA" for NaN.
std::string format_number(double v);

/// Writes a CSV table (UTF-8, LF line endings, header row first). Fields
/// containing commas or quotes are quoted.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

/// Append-only metric log of an experiment run. Rows are written sorted by
/// (experiment, parameters, metric, seed) so output does not depend on the
/// order in which trials finished.
class ExperimentReport {
 public:
  struct Row {
    std::string experiment;
    std::string parameters;
    std::string metric;
    double value = 0.0;
    std::uint64_t seed = 0;
  };

  void add(std::string experiment, std::string parameters, std::string metric, double value,
           std::uint64_t seed);
  void append(const ExperimentReport& other);

  const std::vector<Row>& rows() const { return rows_; }
  /// First value logged under (experiment, parameters, metric), if any.
  const Row* find(const std::string& experiment, const std::string& parameters, const std::string& metric) const;

  void write_csv(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<Row> rows_;
};

}  // namespace crossbar
