// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/matrix_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace crossbar {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  const auto old_precision = out.precision(17);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ' ';
      }
      out << m(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  long long rows = -1;
  long long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("matrix file: malformed dimension line");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::string token;
      if (!(in >> token)) {
        throw std::runtime_error("matrix file: expected " + std::to_string(rows * cols) + " entries");
      }
      try {
        std::size_t used = 0;
        m(i, j) = std::stod(token, &used);
        if (used != token.size()) {
          throw std::invalid_argument(token);
        }
      } catch (const std::exception&) {
        throw std::runtime_error("matrix file: bad number '" + token + "'");
      }
    }
  }
  std::string extra;
  if (in >> extra) {
    throw std::runtime_error("matrix file: trailing data after " + std::to_string(rows * cols) + " entries");
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_matrix(out, m);
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  return read_matrix(in);
}

}  // namespace crossbar
