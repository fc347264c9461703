// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace crossbar {

namespace {

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << quote_field(fields[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "NA";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  write_row(out, header);
  for (const auto& r : rows) {
    write_row(out, r);
  }
}

void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_csv(out, header, rows);
}

void ExperimentReport::add(std::string experiment, std::string parameters, std::string metric, double value,
                           std::uint64_t seed) {
  rows_.push_back({std::move(experiment), std::move(parameters), std::move(metric), value, seed});
}

void ExperimentReport::append(const ExperimentReport& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

const ExperimentReport::Row* ExperimentReport::find(const std::string& experiment, const std::string& parameters,
                                                    const std::string& metric) const {
  for (const auto& r : rows_) {
    if (r.experiment == experiment && r.parameters == parameters && r.metric == metric) {
      return &r;
    }
  }
  return nullptr;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  std::vector<Row> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Row& a, const Row& b) {
    return std::tie(a.experiment, a.parameters, a.metric, a.seed) <
           std::tie(b.experiment, b.parameters, b.metric, b.seed);
  });
  std::vector<std::vector<std::string>> rows;
  rows.reserve(sorted.size());
  for (const auto& r : sorted) {
    rows.push_back({r.experiment, r.parameters, r.metric, format_number(r.value), std::to_string(r.seed)});
  }
  crossbar::write_csv(out, {"experiment", "parameters", "metric", "value", "seed"}, rows);
}

void ExperimentReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_csv(out);
}

}  // namespace crossbar
