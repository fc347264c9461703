// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace crossbar {

namespace {

// Skips whitespace and '#' comments in a PGM header.
void skip_header_space(std::istream& in) {
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c) != 0) {
      in.get();
    } else {
      break;
    }
  }
}

long read_header_int(std::istream& in, const std::filesystem::path& path) {
  skip_header_space(in);
  long v = -1;
  if (!(in >> v) || v < 0) {
    throw std::runtime_error("PGM " + path.string() + ": malformed header");
  }
  return v;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Eigen::MatrixXd FrameStack::frame(std::size_t i) const {
  if (i >= frame_count()) {
    throw std::out_of_range("frame index out of range");
  }
  return unvectorize_frame(pixels.row(static_cast<Eigen::Index>(i)), height, width);
}

void FrameStack::validate() const {
  if (height == 0 || width == 0) {
    throw std::invalid_argument("frames need nonzero height and width");
  }
  if (static_cast<std::size_t>(pixels.cols()) != height * width) {
    throw std::invalid_argument("frame matrix width does not match height * width");
  }
}

Eigen::RowVectorXd vectorize_frame(const Eigen::MatrixXd& image) {
  Eigen::RowVectorXd row(image.size());
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    row.segment(r * image.cols(), image.cols()) = image.row(r);
  }
  return row;
}

Eigen::MatrixXd unvectorize_frame(const Eigen::RowVectorXd& row, std::size_t height, std::size_t width) {
  if (static_cast<std::size_t>(row.size()) != height * width) {
    throw std::invalid_argument("vector length does not match frame size");
  }
  const auto h = static_cast<Eigen::Index>(height);
  const auto w = static_cast<Eigen::Index>(width);
  Eigen::MatrixXd image(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    image.row(r) = row.segment(r * w, w);
  }
  return image;
}

Eigen::MatrixXd read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5" && magic != "P2") {
    throw std::runtime_error("PGM " + path.string() + ": unsupported magic '" + magic + "'");
  }
  const long width = read_header_int(in, path);
  const long height = read_header_int(in, path);
  const long maxval = read_header_int(in, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw std::runtime_error("PGM " + path.string() + ": bad dimensions or maxval");
  }
  Eigen::MatrixXd image(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (long r = 0; r < height; ++r) {
      for (long c = 0; c < width; ++c) {
        image(r, c) = static_cast<double>(read_header_int(in, path)) * scale;
      }
    }
    return image;
  }
  in.get();  // single whitespace before the raster
  const int bytes_per_sample = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raster(static_cast<std::size_t>(width * height * bytes_per_sample));
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw std::runtime_error("PGM " + path.string() + ": truncated raster");
  }
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      const auto k = static_cast<std::size_t>((r * width + c) * bytes_per_sample);
      const unsigned value = bytes_per_sample == 2 ? (unsigned{raster[k]} << 8) | raster[k + 1] : raster[k];
      image(r, c) = static_cast<double>(value) * scale;
    }
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      out.put(static_cast<char>(to_byte(image(r, c))));
    }
  }
}

FrameStack load_pgm_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("no .pgm frames in " + dir.string());
  }
  std::sort(files.begin(), files.end());
  FrameStack stack;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Eigen::MatrixXd image = read_pgm(files[i]);
    if (i == 0) {
      stack.height = static_cast<std::size_t>(image.rows());
      stack.width = static_cast<std::size_t>(image.cols());
      stack.pixels.resize(static_cast<Eigen::Index>(files.size()), image.size());
    } else if (static_cast<std::size_t>(image.rows()) != stack.height ||
               static_cast<std::size_t>(image.cols()) != stack.width) {
      throw std::runtime_error("frame " + files[i].string() + " has a different size");
    }
    stack.pixels.row(static_cast<Eigen::Index>(i)) = vectorize_frame(image);
  }
  return stack;
}

FrameStack load_raw_frames(const std::filesystem::path& bin_path) {
  std::filesystem::path dims_path = bin_path;
  dims_path.replace_extension(".dims");
  std::ifstream dims(dims_path);
  long frames = 0;
  long height = 0;
  long width = 0;
  if (!dims || !(dims >> frames >> height >> width) || frames <= 0 || height <= 0 || width <= 0) {
    throw std::runtime_error("cannot read frame dimensions from " + dims_path.string());
  }
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + bin_path.string());
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(frames * height * width));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error(bin_path.string() + ": fewer bytes than the dims file declares");
  }
  FrameStack stack;
  stack.height = static_cast<std::size_t>(height);
  stack.width = static_cast<std::size_t>(width);
  stack.pixels.resize(frames, height * width);
  for (long f = 0; f < frames; ++f) {
    for (long k = 0; k < height * width; ++k) {
      stack.pixels(f, k) = raw[static_cast<std::size_t>(f * height * width + k)] / 255.0;
    }
  }
  return stack;
}

void save_raw_frames(const std::filesystem::path& bin_path, const FrameStack& frames) {
  frames.validate();
  std::filesystem::path dims_path = bin_path;
  dims_path.replace_extension(".dims");
  std::ofstream dims(dims_path);
  dims << frames.frame_count() << ' ' << frames.height << ' ' << frames.width << '\n';
  std::ofstream out(bin_path, std::ios::binary);
  if (!dims || !out) {
    throw std::runtime_error("cannot write " + bin_path.string());
  }
  for (Eigen::Index f = 0; f < frames.pixels.rows(); ++f) {
    for (Eigen::Index k = 0; k < frames.pixels.cols(); ++k) {
      out.put(static_cast<char>(to_byte(frames.pixels(f, k))));
    }
  }
}

FrameStack load_frames(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    return load_pgm_directory(path);
  }
  if (path.extension() == ".bin") {
    return load_raw_frames(path);
  }
  throw std::runtime_error("frames must be a directory of .pgm files or a .bin file: " + path.string());
}

}  // namespace crossbar
